//! Simulation library for a three-radical quantum magnetic sensor coupled to
//! a collisional environment.
//!
//! The sensor consists of radicals `A`, `B`, `C` with an isotropic exchange
//! interaction, driven by a Zeeman field at angles `(theta, phi)` and coupled
//! to streams of fresh two-level environment particles. Recombination through
//! the singlet channel of `(A, B)` decays the joint state at rate `k`; the
//! direction dependence of the singlet yield is the sensor signal.
//!
//! Modules:
//! - [`pauli`]: exact algebra of weighted Pauli strings on the six sites.
//! - [`model`]: Hamiltonians, interactions and projectors of the sensor.
//! - [`states`]: density matrices, sampling, entropies and coherence measures.
//! - [`dynamics`]: piecewise-analytic propagation through the collision schedule.
//! - [`yields`]: recombination-yield integrals, angle scans and anisotropy.
//! - [`correlations`]: mutual information, discord, Holevo and objectivity.
//! - [`analysis`]: numerical certification of the structural commutator results.

pub mod analysis;
pub mod correlations;
pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod model;
pub mod pauli;
pub mod states;
pub mod yields;

pub use error::SensorError;

/// Result alias used across the crate.
pub type Result<T> = std::result::Result<T, SensorError>;
