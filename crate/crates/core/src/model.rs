//! Hamiltonians and projectors of the three-radical sensor, in d_AB = 1 units
//! with hbar = 1.
//!
//! Sites 0..2 are the radicals A, B, C; sites 3..5 are their private
//! environment qubits E_A, E_B, E_C. The magnetic field acts on the system
//! sites only.
//!
//! For reference, the radicals sit on the z axis at z_A = -0.5, z_B = 0.5,
//! z_C = 1.5. No implemented term depends on the positions (the isotropic
//! exchange and the collision couplings are geometry-free), so they are
//! recorded here rather than in `SensorParams`.

use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use crate::error::SensorError;
use crate::pauli::{Pauli, PauliString, PauliSum, IDENTITY_LABELS};
use crate::Result;

/// System radical sites.
pub const SYSTEM_SITES: [usize; 3] = [0, 1, 2];
/// Environment sites, E_alpha = ENV_SITES[alpha].
pub const ENV_SITES: [usize; 3] = [3, 4, 5];

/// Choice of system-environment collision interaction.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum InteractionKind {
    /// (J_se/2) Σ_α (1-σ_z)^α ⊗ (1-σ_x)^{E_α}; a controlled-NOT at
    /// J_se·τ_se = π/2.
    Cnot,
    /// J_se Σ_α Σ_i σ_i^α ⊗ σ_i^{E_α}; a perfect swap at J_se·τ_se = π/4.
    Swap,
}

impl InteractionKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cnot" => Ok(InteractionKind::Cnot),
            "swap" => Ok(InteractionKind::Swap),
            other => Err(SensorError::rejected(format!(
                "unknown interaction kind '{other}' (expected cnot or swap)"
            ))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            InteractionKind::Cnot => "cnot",
            InteractionKind::Swap => "swap",
        }
    }
}

/// Model constants, all in d_AB = 1 units.
///
/// `j_se_tau` stores the dimensionless product J_se·τ_se; the coupling
/// strength itself is derived as `j_se_tau / tau_se`, since the CNOT and
/// SWAP calibrations are conditions on the product.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SensorParams {
    /// Isotropic exchange coupling J_ABC.
    pub j_abc: f64,
    /// Recombination decay rate k.
    pub k: f64,
    /// Zeeman strength γB₀.
    pub gamma_b0: f64,
    /// Collision duration τ_se.
    pub tau_se: f64,
    /// Free-evolution duration τ_ee.
    pub tau_ee: f64,
    /// Dimensionless product J_se·τ_se.
    pub j_se_tau: f64,
    pub interaction_kind: InteractionKind,
}

impl Default for SensorParams {
    /// Reference parameter set: isotropic J_ABC = 1, k = 0.0245,
    /// γB₀ = 0.215, τ_se = τ_ee = 1, J_se·τ_se = π/2, CNOT interaction.
    fn default() -> Self {
        SensorParams {
            j_abc: 1.0,
            k: 0.0245,
            gamma_b0: 0.215,
            tau_se: 1.0,
            tau_ee: 1.0,
            j_se_tau: FRAC_PI_2,
            interaction_kind: InteractionKind::Cnot,
        }
    }
}

impl SensorParams {
    /// Defaults with the swap interaction at its perfect-swap calibration
    /// J_se·τ_se = π/4.
    pub fn swap_defaults() -> Self {
        SensorParams {
            j_se_tau: FRAC_PI_4,
            interaction_kind: InteractionKind::Swap,
            ..SensorParams::default()
        }
    }

    /// Collision period T = τ_se + τ_ee.
    pub fn period(&self) -> f64 {
        self.tau_se + self.tau_ee
    }

    /// Coupling strength J_se = (J_se·τ_se) / τ_se.
    pub fn j_se(&self) -> f64 {
        self.j_se_tau / self.tau_se
    }

    /// Durations and the decay rate must be strictly positive; couplings may
    /// be zero (switching a term off is meaningful).
    pub fn validate(&self) -> Result<()> {
        if self.k <= 0.0 || self.k.is_nan() {
            return Err(SensorError::rejected(format!(
                "decay rate k must be strictly positive, got {}",
                self.k
            )));
        }
        if !(self.tau_se > 0.0 && self.tau_ee > 0.0) {
            return Err(SensorError::rejected(format!(
                "durations must be strictly positive, got tau_se={} tau_ee={}",
                self.tau_se, self.tau_ee
            )));
        }
        for (name, v) in [
            ("j_abc", self.j_abc),
            ("gamma_b0", self.gamma_b0),
            ("j_se_tau", self.j_se_tau),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(SensorError::rejected(format!(
                    "{name} must be finite and non-negative, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Magnetic-field direction. The field vector is
/// B₀(cosθ sinφ, sinθ sinφ, cosφ).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FieldAngles {
    /// Azimuthal angle θ ∈ [0, 2π).
    pub theta: f64,
    /// Polar angle φ ∈ [0, π].
    pub phi: f64,
}

impl FieldAngles {
    pub fn new(theta: f64, phi: f64) -> Self {
        FieldAngles { theta, phi }
    }

    /// Unit direction (cosθ sinφ, sinθ sinφ, cosφ).
    pub fn direction(&self) -> [f64; 3] {
        [
            self.theta.cos() * self.phi.sin(),
            self.theta.sin() * self.phi.sin(),
            self.phi.cos(),
        ]
    }
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// σ_i^a · σ_i^b two-site string.
fn two_site(a: usize, b: usize, p: Pauli, coeff: f64) -> PauliString {
    let mut labels = IDENTITY_LABELS;
    labels[a] = p;
    labels[b] = p;
    PauliString::new(labels, c(coeff))
}

/// Electron-exchange interaction
/// −J_ABC Σ_{α<β} (1/2 + 2 S⃗^α·S⃗^β) with S⃗ = σ⃗/2:
/// per pair −(J/2)(1 + σ⃗^α·σ⃗^β), identity on the environment sites.
pub fn h_exchange(p: &SensorParams) -> PauliSum {
    let mut sum = PauliSum::zero();
    let j = p.j_abc;
    if j == 0.0 {
        return sum;
    }
    for (a, b) in [(0usize, 1usize), (0, 2), (1, 2)] {
        sum.add_term(PauliString::new(IDENTITY_LABELS, c(-j / 2.0)));
        for axis in [Pauli::X, Pauli::Y, Pauli::Z] {
            sum.add_term(two_site(a, b, axis, -j / 2.0));
        }
    }
    sum
}

/// Zeeman interaction γ B⃗₀·Σ_α S⃗^α
/// = (γB₀/2) Σ_α (cosθ sinφ σ_x + sinθ sinφ σ_y + cosφ σ_z)^α,
/// acting on the system sites only.
pub fn h_zeeman(p: &SensorParams, a: &FieldAngles) -> PauliSum {
    let half = p.gamma_b0 / 2.0;
    let dir = a.direction();
    let mut sum = PauliSum::zero();
    for &site in SYSTEM_SITES.iter() {
        for (axis, component) in [(Pauli::X, dir[0]), (Pauli::Y, dir[1]), (Pauli::Z, dir[2])] {
            sum.add_term(PauliString::single(site, axis, c(half * component)));
        }
    }
    sum
}

/// Collision interaction V_SE coupling each radical to its own environment
/// site. CNOT kind: (J_se/2) Σ_α (1−σ_z)^α ⊗ (1−σ_x)^{E_α}.
/// Swap kind: J_se Σ_α Σ_i σ_i^α ⊗ σ_i^{E_α}.
pub fn v_interaction(p: &SensorParams) -> PauliSum {
    let j = p.j_se();
    let mut sum = PauliSum::zero();
    match p.interaction_kind {
        InteractionKind::Cnot => {
            let w = j / 2.0;
            for alpha in 0..3 {
                let s = SYSTEM_SITES[alpha];
                let e = ENV_SITES[alpha];
                sum.add_term(PauliString::new(IDENTITY_LABELS, c(w)));
                sum.add_term(PauliString::single(s, Pauli::Z, c(-w)));
                sum.add_term(PauliString::single(e, Pauli::X, c(-w)));
                let mut labels = IDENTITY_LABELS;
                labels[s] = Pauli::Z;
                labels[e] = Pauli::X;
                sum.add_term(PauliString::new(labels, c(w)));
            }
        }
        InteractionKind::Swap => {
            for alpha in 0..3 {
                for axis in [Pauli::X, Pauli::Y, Pauli::Z] {
                    sum.add_term(two_site(SYSTEM_SITES[alpha], ENV_SITES[alpha], axis, j));
                }
            }
        }
    }
    sum
}

/// Singlet projector on the primary radical pair (A, B):
/// (1/4)(1 − σ⃗^A·σ⃗^B), identity on C and the environment sites.
pub fn singlet_projector() -> PauliSum {
    let mut sum = PauliSum::zero();
    sum.add_term(PauliString::new(IDENTITY_LABELS, c(0.25)));
    for axis in [Pauli::X, Pauli::Y, Pauli::Z] {
        sum.add_term(two_site(0, 1, axis, -0.25));
    }
    sum
}

/// Total spin component Σ_α σ_i^α over the system sites.
pub fn total_system_spin(axis: Pauli) -> PauliSum {
    PauliSum::from_terms(
        SYSTEM_SITES
            .iter()
            .map(|&s| PauliString::single(s, axis, Complex64::ONE)),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg;
    use crate::pauli::{commutator, DIM};

    #[test]
    fn defaults_match_reference_values() {
        let p = SensorParams::default();
        assert_eq!(p.j_abc, 1.0);
        assert_eq!(p.k, 0.0245);
        assert_eq!(p.gamma_b0, 0.215);
        assert_eq!(p.tau_se, 1.0);
        assert_eq!(p.tau_ee, 1.0);
        assert_eq!(p.j_se_tau, FRAC_PI_2);
        assert_eq!(p.interaction_kind, InteractionKind::Cnot);
        assert_eq!(p.period(), 2.0);
        p.validate().unwrap();
    }

    #[test]
    fn exchange_zero_coupling_vanishes() {
        let p = SensorParams {
            j_abc: 0.0,
            ..SensorParams::default()
        };
        assert!(h_exchange(&p).is_empty());
    }

    #[test]
    fn exchange_structure_at_unit_coupling() {
        let h = h_exchange(&SensorParams::default());
        // 9 two-site terms plus the identity term −3/2.
        assert_eq!(h.len(), 10);
        assert!((h.coefficient(&IDENTITY_LABELS) - c(-1.5)).norm() < 1e-15);
        for (a, b) in [(0usize, 1usize), (0, 2), (1, 2)] {
            for axis in [Pauli::X, Pauli::Y, Pauli::Z] {
                let mut l = IDENTITY_LABELS;
                l[a] = axis;
                l[b] = axis;
                assert!((h.coefficient(&l) - c(-0.5)).norm() < 1e-15);
            }
        }
        assert!(h.is_hermitian(0.0));
    }

    #[test]
    fn exchange_commutes_with_total_spin() {
        let h = h_exchange(&SensorParams::default());
        for axis in [Pauli::X, Pauli::Y, Pauli::Z] {
            let comm = commutator(&h, &total_system_spin(axis));
            assert!(comm.is_empty(), "exchange must commute with total spin");
        }
    }

    #[test]
    fn zeeman_axis_cases() {
        let p = SensorParams::default();
        let hz = h_zeeman(&p, &FieldAngles::new(0.0, 0.0));
        assert_eq!(hz.len(), 3);
        for &s in SYSTEM_SITES.iter() {
            let mut l = IDENTITY_LABELS;
            l[s] = Pauli::Z;
            assert!((hz.coefficient(&l) - c(p.gamma_b0 / 2.0)).norm() < 1e-15);
        }

        let hx = h_zeeman(&p, &FieldAngles::new(0.0, FRAC_PI_2));
        assert_eq!(hx.len(), 3);
        for &s in SYSTEM_SITES.iter() {
            let mut l = IDENTITY_LABELS;
            l[s] = Pauli::X;
            assert!((hx.coefficient(&l) - c(p.gamma_b0 / 2.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn zeeman_spectrum_is_angle_independent() {
        use rand::{Rng, SeedableRng};
        let p = SensorParams::default();
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(2);
        let reference = {
            let h = h_zeeman(&p, &FieldAngles::new(0.0, 0.0)).to_dense();
            nalgebra::linalg::SymmetricEigen::new(h)
                .eigenvalues
                .iter()
                .fold(0.0_f64, |m, &v| m.max(v.abs()))
        };
        for _ in 0..50 {
            let angles = FieldAngles::new(
                rng.random::<f64>() * std::f64::consts::TAU,
                rng.random::<f64>() * std::f64::consts::PI,
            );
            let h = h_zeeman(&p, &angles).to_dense();
            let top = nalgebra::linalg::SymmetricEigen::new(h)
                .eigenvalues
                .iter()
                .fold(0.0_f64, |m, &v| m.max(v.abs()));
            assert!((top - reference).abs() < 1e-9);
        }
    }

    #[test]
    fn zeeman_trivial_on_environment() {
        let p = SensorParams::default();
        let h = h_zeeman(&p, &FieldAngles::new(1.0, 2.0));
        for (labels, _) in h.terms() {
            assert!(labels[3..].iter().all(|&l| l == Pauli::I));
        }
    }

    #[test]
    fn interaction_couples_only_private_pairs() {
        for p in [SensorParams::default(), SensorParams::swap_defaults()] {
            let v = v_interaction(&p);
            for (labels, _) in v.terms() {
                // No cross-radical or cross-environment support.
                let support: Vec<usize> = (0..6).filter(|&s| labels[s] != Pauli::I).collect();
                match support.len() {
                    0 | 1 => {}
                    2 => {
                        let (a, b) = (support[0], support[1]);
                        assert_eq!(b, a + 3, "support must be a radical with its own bath");
                    }
                    n => panic!("interaction term with {n}-site support"),
                }
            }
            assert!(v.is_hermitian(0.0));
        }
    }

    #[test]
    fn cnot_interaction_is_sigma_z_diagonal_on_system() {
        let v = v_interaction(&SensorParams::default());
        for (labels, _) in v.terms() {
            for &s in SYSTEM_SITES.iter() {
                assert!(labels[s] == Pauli::I || labels[s] == Pauli::Z);
            }
        }
        for &s in SYSTEM_SITES.iter() {
            let z = PauliSum::from(PauliString::single(s, Pauli::Z, Complex64::ONE));
            assert!(commutator(&v, &z).is_empty());
        }
    }

    #[test]
    fn singlet_projector_is_idempotent() {
        let proj = singlet_projector();
        let square = proj.multiply(&proj);
        let diff = square.sub(&proj);
        assert!(
            diff.fro_norm() < 1e-13,
            "projector must be idempotent, defect {}",
            diff.fro_norm()
        );
    }

    #[test]
    fn singlet_projector_trace_against_dense() {
        let proj = singlet_projector();
        let dense = proj.to_dense();
        let tr: Complex64 = (0..DIM).map(|i| dense[(i, i)]).sum();
        // tr[P (1/64)] = 1/4 means tr P = 16.
        assert!((tr - c(16.0)).norm() < 1e-12);
        assert!((proj.trace() - c(16.0)).norm() < 1e-12);
    }

    #[test]
    fn singlet_commutes_with_zeeman_at_random_angles() {
        use rand::{Rng, SeedableRng};
        let p = SensorParams::default();
        let proj = singlet_projector();
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(9);
        for _ in 0..20 {
            let angles = FieldAngles::new(
                rng.random::<f64>() * std::f64::consts::TAU,
                rng.random::<f64>() * std::f64::consts::PI,
            );
            let comm = commutator(&proj, &h_zeeman(&p, &angles));
            assert!(comm.fro_norm() < 1e-13);
        }
    }

    #[test]
    fn singlet_does_not_commute_with_interaction() {
        for p in [SensorParams::default(), SensorParams::swap_defaults()] {
            let comm = commutator(&singlet_projector(), &v_interaction(&p));
            assert!(comm.fro_norm() > 0.1);
        }
    }

    #[test]
    fn constructed_operators_survive_dense_round_trip() {
        let p = SensorParams::default();
        let ops = [
            h_exchange(&p),
            h_zeeman(&p, &FieldAngles::new(0.3, 1.1)),
            v_interaction(&p),
            singlet_projector(),
        ];
        for op in ops.iter() {
            let dense = op.to_dense();
            assert!(linalg::hermiticity_defect(&dense) < 1e-12);
            let back = PauliSum::from_dense(&dense).unwrap();
            assert!(linalg::max_abs_diff(&back.to_dense(), &dense) < 1e-10);
            assert!(back.is_hermitian(1e-12));
        }
    }

    #[test]
    fn invalid_params_rejected() {
        let bad = SensorParams {
            k: 0.0,
            ..SensorParams::default()
        };
        assert!(bad.validate().is_err());
        let bad = SensorParams {
            tau_se: -1.0,
            ..SensorParams::default()
        };
        assert!(bad.validate().is_err());
    }
}
