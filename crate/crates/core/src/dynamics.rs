//! Piecewise-analytic propagation of the joint six-qubit state through the
//! two-segment collision schedule with recombination decay.
//!
//! Within a segment the generator is time independent, so the equation of
//! motion dρ/dt = -i[H, ρ] - kρ integrates element-wise in the eigenbasis of
//! H: ⟨i|ρ(t)|j⟩ = e^{-kt} e^{-iΔω_ij t} ⟨i|ρ(0)|j⟩. One eigendecomposition
//! per segment type is reused across all iterations; the fresh environment
//! changes the state, never the generator.

use nalgebra::linalg::SymmetricEigen;
use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::SensorError;
use crate::linalg::{self, CMatrix};
use crate::model::{self, FieldAngles, SensorParams};
use crate::pauli::{PauliSum, DIM};
use crate::states::{partial_trace, DensityMatrix};
use crate::Result;

/// Cached eigendecomposition of a segment Hamiltonian.
#[derive(Clone, Debug)]
pub struct Propagator {
    eigenvalues: DVector<f64>,
    eigenvectors: CMatrix,
    eigenvectors_adjoint: CMatrix,
}

impl Propagator {
    /// Decompose a Hermitian operator given as a Pauli sum. The dense matrix
    /// is symmetrized as (H+H†)/2 first to absorb assembly round-off.
    pub fn from_pauli_sum(h: &PauliSum) -> Result<Self> {
        Propagator::from_dense(&h.to_dense())
    }

    /// Decompose a dense Hamiltonian on the full register.
    pub fn from_dense(h: &CMatrix) -> Result<Self> {
        if h.shape() != (DIM, DIM) {
            return Err(SensorError::rejected(format!(
                "propagator expects a {DIM}x{DIM} Hamiltonian, got {}x{}",
                h.nrows(),
                h.ncols()
            )));
        }
        let sym = linalg::hermitize(h);
        let eig = SymmetricEigen::new(sym.clone());
        let adjoint = eig.eigenvectors.adjoint();
        let prop = Propagator {
            eigenvalues: eig.eigenvalues,
            eigenvectors: eig.eigenvectors,
            eigenvectors_adjoint: adjoint,
        };
        let recon_err = linalg::max_abs_diff(&prop.reconstruct(), &sym);
        if recon_err > 1e-10 {
            return Err(SensorError::numerical(format!(
                "eigendecomposition reconstruction error {recon_err:.3e}"
            )));
        }
        let unit_err = linalg::unitarity_defect(&prop.eigenvectors);
        if unit_err > 1e-10 {
            return Err(SensorError::numerical(format!(
                "eigenvector matrix unitarity defect {unit_err:.3e}"
            )));
        }
        Ok(prop)
    }

    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &CMatrix {
        &self.eigenvectors
    }

    /// V diag(ω) V†.
    pub fn reconstruct(&self) -> CMatrix {
        let d = CMatrix::from_diagonal(&self.eigenvalues.map(|w| Complex64::new(w, 0.0)));
        linalg::conjugate_by_adjoint(&self.eigenvectors, &d)
    }

    /// V† m V.
    pub fn to_eigenbasis(&self, m: &CMatrix) -> CMatrix {
        let tmp = linalg::mul(&self.eigenvectors_adjoint, m);
        linalg::mul(&tmp, &self.eigenvectors)
    }

    /// V m V†.
    pub fn from_eigenbasis(&self, m: &CMatrix) -> CMatrix {
        let tmp = linalg::mul(&self.eigenvectors, m);
        linalg::mul(&tmp, &self.eigenvectors_adjoint)
    }

    /// In-place element-wise evolution in the eigenbasis:
    /// m_ij ← m_ij · e^{-kτ} e^{-i(ω_i-ω_j)τ}.
    pub fn phase_evolve_in_basis(&self, m: &mut CMatrix, tau: f64, k: f64) {
        let decay = (-k * tau).exp();
        let phases: Vec<Complex64> = self
            .eigenvalues
            .iter()
            .map(|&w| Complex64::from_polar(decay.sqrt(), -w * tau))
            .collect();
        // Column-major storage: column j is one contiguous chunk.
        for (j, col) in m.as_mut_slice().chunks_exact_mut(DIM).enumerate() {
            let pj = phases[j].conj();
            for (entry, pi) in col.iter_mut().zip(phases.iter()) {
                *entry *= pi * pj;
            }
        }
    }

    /// Dense unitary U_τ = V diag(e^{-iωτ}) V†.
    pub fn unitary(&self, tau: f64) -> CMatrix {
        let d = CMatrix::from_diagonal(
            &self
                .eigenvalues
                .map(|w| Complex64::from_polar(1.0, -w * tau)),
        );
        linalg::conjugate_by_adjoint(&self.eigenvectors, &d)
    }
}

/// Analytic segment evolution e^{-kτ} U_τ ρ U_τ†: transform into the
/// eigenbasis, multiply element (i,j) by e^{(-iΔω_ij - k)τ}, transform out.
/// Hermiticity and positivity are preserved; the trace is multiplied by
/// exactly e^{-kτ}.
pub fn evolve_segment(
    rho: &DensityMatrix,
    prop: &Propagator,
    tau: f64,
    k: f64,
) -> DensityMatrix {
    assert!(tau >= 0.0, "segment duration must be non-negative");
    if tau == 0.0 {
        return rho.clone();
    }
    let mut tilde = prop.to_eigenbasis(rho.matrix());
    prop.phase_evolve_in_basis(&mut tilde, tau, k);
    let out = prop.from_eigenbasis(&tilde);
    DensityMatrix::from_parts_unchecked(out, rho.trace() * (-k * tau).exp())
}

/// Engine threading the joint state through the repeated two-segment
/// collision schedule. Segment propagators are built once per
/// (params, angles) pair and reused for every iteration.
pub struct CollisionEngine {
    params: SensorParams,
    seg_a: Propagator,
    seg_b: Propagator,
    joint: DensityMatrix,
    fresh_env: DensityMatrix,
    t: f64,
    n: u64,
}

impl CollisionEngine {
    /// Initialize with ρ_S(0) on (A,B,C) and the fresh-environment state
    /// drawn at every iteration on (E_A,E_B,E_C); both 8-dimensional.
    pub fn new(
        params: &SensorParams,
        angles: &FieldAngles,
        rho_s0: &DensityMatrix,
        rho_e0: &DensityMatrix,
    ) -> Result<Self> {
        params.validate()?;
        if rho_s0.dim() != 8 || rho_e0.dim() != 8 {
            return Err(SensorError::rejected(format!(
                "engine expects 8-dim system and environment states, got {} and {}",
                rho_s0.dim(),
                rho_e0.dim()
            )));
        }
        let (seg_a, seg_b) = segment_propagators(params, angles)?;
        Ok(CollisionEngine {
            params: *params,
            seg_a,
            seg_b,
            joint: rho_s0.tensor(rho_e0),
            fresh_env: rho_e0.clone(),
            t: 0.0,
            n: 0,
        })
    }

    pub fn joint(&self) -> &DensityMatrix {
        &self.joint
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn iterations(&self) -> u64 {
        self.n
    }

    pub fn seg_a(&self) -> &Propagator {
        &self.seg_a
    }

    pub fn seg_b(&self) -> &Propagator {
        &self.seg_b
    }

    pub fn params(&self) -> &SensorParams {
        &self.params
    }

    /// One full collision iteration: interaction segment for τ_se, free
    /// segment for τ_ee, then environment refresh at the iteration boundary.
    /// Correlations measured during iteration n see the pre-refresh state.
    pub fn step(&mut self) {
        let p = &self.params;
        let mid = evolve_segment(&self.joint, &self.seg_a, p.tau_se, p.k);
        let end = evolve_segment(&mid, &self.seg_b, p.tau_ee, p.k);
        self.joint = self.refresh_environment(&end);
        self.t += p.period();
        self.n += 1;
    }

    /// Replace the environment factor: Tr_E[ρ] ⊗ ρ_E,fresh.
    fn refresh_environment(&self, rho: &DensityMatrix) -> DensityMatrix {
        let system = partial_trace(rho, &[0, 1, 2]).expect("system sites are valid");
        system.tensor(&self.fresh_env)
    }
}

/// Segment Hamiltonian pair: H_total = H_ex + H_B + V_SE for the interaction
/// segment, H'_total = H_ex + H_B for the free segment (identity on the
/// environment sites).
pub fn segment_propagators(
    params: &SensorParams,
    angles: &FieldAngles,
) -> Result<(Propagator, Propagator)> {
    let h_free = model::h_exchange(params).add(&model::h_zeeman(params, angles));
    let h_full = h_free.add(&model::v_interaction(params));
    Ok((
        Propagator::from_pauli_sum(&h_full)?,
        Propagator::from_pauli_sum(&h_free)?,
    ))
}

/// Classic fixed-step 4th-order integration of dρ/dt = -i[H,ρ] - kρ.
/// Test oracle only; production paths use the analytic segment evolution.
pub fn ode_reference(
    rho: &DensityMatrix,
    h: &CMatrix,
    k: f64,
    tau: f64,
    dt: f64,
) -> Result<DensityMatrix> {
    if dt <= 0.0 || dt.is_nan() || dt > tau / 100.0 {
        return Err(SensorError::rejected(format!(
            "ode_reference requires 0 < dt ≤ tau/100, got dt={dt} tau={tau}"
        )));
    }
    let d = rho.dim();
    assert_eq!(h.shape(), (d, d));
    let steps = (tau / dt).round().max(1.0) as usize;
    let dt = tau / steps as f64;
    let rhs = |m: &CMatrix| -> CMatrix {
        let hm = linalg::mul(h, m);
        let mh = linalg::mul(m, h);
        (hm - mh).map(|z| z * Complex64::new(0.0, -1.0)) - m.map(|z| z * k)
    };
    let mut state = rho.matrix().clone();
    for _ in 0..steps {
        let k1 = rhs(&state);
        let k2 = rhs(&(&state + k1.map(|z| z * (dt / 2.0))));
        let k3 = rhs(&(&state + k2.map(|z| z * (dt / 2.0))));
        let k4 = rhs(&(&state + k3.map(|z| z * dt)));
        state += (k1 + k2.map(|z| z * 2.0) + k3.map(|z| z * 2.0) + k4).map(|z| z * (dt / 6.0));
    }
    let tr: Complex64 = (0..d).map(|i| state[(i, i)]).sum();
    Ok(DensityMatrix::from_parts_unchecked(state, tr.re))
}

/// One sampled point of a trajectory dump.
#[derive(Clone, Copy, Debug)]
pub struct TrajectoryRow {
    pub t: f64,
    pub trace: f64,
    /// tr[P_singlet ρ(t)] on the raw decaying state.
    pub singlet_population: f64,
    /// C₁* of the reduced system state.
    pub c1_star: f64,
}

/// Sample the joint evolution at segment boundaries for `periods` iterations.
pub fn trajectory(
    params: &SensorParams,
    angles: &FieldAngles,
    rho_s0: &DensityMatrix,
    rho_e0: &DensityMatrix,
    periods: usize,
) -> Result<Vec<TrajectoryRow>> {
    let mut engine = CollisionEngine::new(params, angles, rho_s0, rho_e0)?;
    let proj = model::singlet_projector().to_dense();
    let row = |t: f64, rho: &DensityMatrix| -> Result<TrajectoryRow> {
        let sys = partial_trace(rho, &[0, 1, 2])?;
        Ok(TrajectoryRow {
            t,
            trace: rho.trace(),
            singlet_population: rho.expectation(&proj)?,
            c1_star: crate::states::coherence_c1_star(&sys)?,
        })
    };
    let mut rows = vec![row(0.0, engine.joint())?];
    for _ in 0..periods {
        let t0 = engine.time();
        let mid = evolve_segment(&engine.joint, &engine.seg_a, params.tau_se, params.k);
        rows.push(row(t0 + params.tau_se, &mid)?);
        let end = evolve_segment(&mid, &engine.seg_b, params.tau_ee, params.k);
        rows.push(row(t0 + params.period(), &end)?);
        engine.joint = engine.refresh_environment(&end);
        engine.t = t0 + params.period();
        engine.n += 1;
    }
    Ok(rows)
}

/// Truncation horizon for the yield integral: t_max = ln(1/eps_tail)/k,
/// rounded up to a whole number of collision periods (at least one).
pub fn horizon(params: &SensorParams, eps_tail: f64) -> Result<f64> {
    Ok(horizon_periods(params, eps_tail)? as f64 * params.period())
}

/// Same horizon expressed as a number of collision iterations.
pub fn horizon_periods(params: &SensorParams, eps_tail: f64) -> Result<usize> {
    if !(eps_tail > 0.0 && eps_tail < 1.0) {
        return Err(SensorError::rejected(format!(
            "eps_tail must lie in (0, 1), got {eps_tail}"
        )));
    }
    params.validate()?;
    let t = (1.0 / eps_tail).ln() / params.k;
    Ok(((t / params.period()).ceil() as usize).max(1))
}
