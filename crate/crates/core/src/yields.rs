//! Recombination-yield integrals, weighted observable yields, angle-grid
//! scans and anisotropy statistics.
//!
//! Per segment the yield integral has a closed form in the propagator
//! eigenbasis: k∫₀^τ e^{-kt} tr[P U_t ρ U_t†] dt = Σ_ij P̃_ji ρ̃_ij · k·g_ij
//! with g_ij = (1 - e^{-(iΔω_ij+k)τ})/(iΔω_ij + k), which never degenerates
//! since k > 0.
//!
//! Scans over many states reuse two cached objects per field angle: the
//! per-iteration superoperator on the 8-dim system state (the environment is
//! refreshed identically every period, so one collision period is a fixed
//! linear map) and the accumulated yield functional summed over the horizon
//! by a geometric series. This route is exact up to round-off and is pinned
//! against the engine-threaded reference in the tests.

use nalgebra::DVector;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::dynamics::{horizon_periods, segment_propagators, Propagator};
use crate::error::SensorError;
use crate::linalg::{self, CMatrix};
use crate::model::{self, FieldAngles, SensorParams};
use crate::pauli::{PauliSum, DIM};
use crate::states::{partial_trace, DensityMatrix};
use crate::Result;

/// Tolerance on the imaginary part of yield integrals before it is discarded.
const IMAG_TOL: f64 = 1e-11;

/// A state functional integrated against the recombination weight, e.g. the
/// trace-decreasing coherence of the reduced system state.
pub trait StateObservable: Sync + Send {
    fn name(&self) -> &str;
    /// Evaluate on the raw (decaying) joint state.
    fn evaluate(&self, rho: &DensityMatrix) -> Result<f64>;
}

/// Constant-one observable; its weighted yield is exactly 1.
pub struct UnitObservable;

impl StateObservable for UnitObservable {
    fn name(&self) -> &str {
        "one"
    }

    fn evaluate(&self, _rho: &DensityMatrix) -> Result<f64> {
        Ok(1.0)
    }
}

/// C₁* of the reduced system state ρ_ABC, evaluated on the raw trace.
pub struct SystemC1Star;

impl StateObservable for SystemC1Star {
    fn name(&self) -> &str {
        "c1star"
    }

    fn evaluate(&self, rho: &DensityMatrix) -> Result<f64> {
        let sys = partial_trace(rho, &[0, 1, 2])?;
        crate::states::coherence_c1_star(&sys)
    }
}

/// Projector and integral kernel of one segment type, cached in the
/// propagator eigenbasis.
struct SegmentKernel {
    /// P̃ = V†PV.
    p_tilde: CMatrix,
    /// Q̃_ji = k · P̃_ji · g_ij; tr[Q̃ ρ̃] is the segment yield.
    q_tilde: CMatrix,
}

impl SegmentKernel {
    fn new(prop: &Propagator, proj_dense: &CMatrix, k: f64, tau: f64) -> Self {
        let p_tilde = prop.to_eigenbasis(proj_dense);
        let w = prop.eigenvalues();
        let mut q_tilde = CMatrix::zeros(DIM, DIM);
        for j in 0..DIM {
            for i in 0..DIM {
                let a = Complex64::new(k, w[i] - w[j]);
                let g = (Complex64::ONE - (-a * tau).exp()) / a;
                q_tilde[(j, i)] = k * p_tilde[(j, i)] * g;
            }
        }
        SegmentKernel { p_tilde, q_tilde }
    }

    /// k∫₀^τ e^{-kt} tr[P U_t ρ U_t†] dt for ρ̃ given in the eigenbasis.
    fn integral(&self, rho_tilde: &CMatrix) -> Result<f64> {
        contract(&self.q_tilde, rho_tilde)
    }

    /// Instantaneous weight tr[P ρ] for ρ̃ given in the eigenbasis.
    fn weight(&self, rho_tilde: &CMatrix) -> Result<f64> {
        contract(&self.p_tilde, rho_tilde)
    }
}

/// tr[A ρ] = Σ_ij A_ji ρ_ij, checked real.
fn contract(a: &CMatrix, rho: &CMatrix) -> Result<f64> {
    let n = a.nrows();
    let a_slice = a.as_slice();
    let r_slice = rho.as_slice();
    let mut acc = Complex64::ZERO;
    // Column i of A holds A_{j,i}; pair it with row i of ρ (stride n).
    for (i, a_col) in a_slice.chunks_exact(n).enumerate() {
        for (aji, rij) in a_col.iter().zip(r_slice[i..].iter().step_by(n)) {
            acc += aji * rij;
        }
    }
    if acc.im.abs() > IMAG_TOL {
        return Err(SensorError::numerical(format!(
            "yield integral has imaginary part {:.3e}",
            acc.im
        )));
    }
    Ok(acc.re)
}

/// Closed-form per-segment yield k∫₀^τ e^{-kt} tr[P U_t ρ U_t†] dt.
pub fn segment_yield(
    rho_start: &DensityMatrix,
    prop: &Propagator,
    proj: &PauliSum,
    k: f64,
    tau: f64,
) -> Result<f64> {
    if k <= 0.0 || k.is_nan() {
        return Err(SensorError::rejected(format!(
            "segment_yield requires k > 0, got {k}"
        )));
    }
    if tau <= 0.0 || tau.is_nan() {
        return Err(SensorError::rejected(format!(
            "segment_yield requires tau > 0, got {tau}"
        )));
    }
    let kernel = SegmentKernel::new(prop, &proj.to_dense(), k, tau);
    kernel.integral(&prop.to_eigenbasis(rho_start.matrix()))
}

fn check_initial_states(rho_s0: &DensityMatrix, rho_e0: &DensityMatrix) -> Result<()> {
    for (name, rho) in [("system", rho_s0), ("environment", rho_e0)] {
        if rho.dim() != 8 {
            return Err(SensorError::rejected(format!(
                "{name} state must be 8-dimensional, got {}",
                rho.dim()
            )));
        }
        if (rho.trace() - 1.0).abs() > 1e-8 {
            return Err(SensorError::rejected(format!(
                "{name} state must have unit trace, got {}",
                rho.trace()
            )));
        }
    }
    Ok(())
}

/// Singlet recombination yield φ_singlet, engine-threaded over both segments
/// of every iteration up to the truncation horizon.
pub fn singlet_yield(
    params: &SensorParams,
    rho_s0: &DensityMatrix,
    rho_e0: &DensityMatrix,
    angles: &FieldAngles,
    eps_tail: f64,
) -> Result<f64> {
    params.validate()?;
    check_initial_states(rho_s0, rho_e0)?;
    let (seg_a, seg_b) = segment_propagators(params, angles)?;
    let proj = model::singlet_projector().to_dense();
    let kern_a = SegmentKernel::new(&seg_a, &proj, params.k, params.tau_se);
    let kern_b = SegmentKernel::new(&seg_b, &proj, params.k, params.tau_ee);
    let periods = horizon_periods(params, eps_tail)?;

    let mut joint = rho_s0.tensor(rho_e0);
    let mut total = 0.0;
    for _ in 0..periods {
        let (yield_a, mid) = advance_segment(&seg_a, &kern_a, &joint, params.tau_se, params.k)?;
        let (yield_b, end) = advance_segment(&seg_b, &kern_b, &mid, params.tau_ee, params.k)?;
        total += yield_a + yield_b;
        let system = partial_trace(&end, &[0, 1, 2])?;
        joint = system.tensor(rho_e0);
    }
    Ok(total)
}

/// Integrate one segment and return (yield contribution, state at segment end).
fn advance_segment(
    prop: &Propagator,
    kernel: &SegmentKernel,
    rho: &DensityMatrix,
    tau: f64,
    k: f64,
) -> Result<(f64, DensityMatrix)> {
    let mut tilde = prop.to_eigenbasis(rho.matrix());
    let y = kernel.integral(&tilde)?;
    prop.phase_evolve_in_basis(&mut tilde, tau, k);
    let out = prop.from_eigenbasis(&tilde);
    Ok((
        y,
        DensityMatrix::from_parts_unchecked(out, rho.trace() * (-k * tau).exp()),
    ))
}

/// Cached per-angle yield evaluator: one collision period acts on the system
/// state as a fixed linear map (the environment refresh is identical every
/// iteration), so the horizon sum collapses to a geometric series and the
/// whole yield becomes a single linear functional of ρ_S(0).
pub struct YieldMap {
    /// 64-vector w with φ = Re Σ_idx w_idx · vec(ρ_S)_idx.
    functional: DVector<Complex64>,
}

impl YieldMap {
    pub fn build(
        params: &SensorParams,
        angles: &FieldAngles,
        rho_e0: &DensityMatrix,
        eps_tail: f64,
    ) -> Result<Self> {
        params.validate()?;
        if rho_e0.dim() != 8 {
            return Err(SensorError::rejected(format!(
                "environment state must be 8-dimensional, got {}",
                rho_e0.dim()
            )));
        }
        let (seg_a, seg_b) = segment_propagators(params, angles)?;
        let proj = model::singlet_projector().to_dense();
        let kern_a = SegmentKernel::new(&seg_a, &proj, params.k, params.tau_se);
        let kern_b = SegmentKernel::new(&seg_b, &proj, params.k, params.tau_ee);
        let periods = horizon_periods(params, eps_tail)?;

        let u_a = seg_a.unitary(params.tau_se);
        let u_b = seg_b.unitary(params.tau_ee);
        let w_full = linalg::mul(&u_b, &u_a);
        let decay_a = (-params.k * params.tau_se).exp();
        let decay_t = (-params.k * params.period()).exp();

        // Per-iteration yield kernel on the joint state:
        // Z = Y_a + e^{-kτ_se} U_a† Y_b U_a with Y_x = V_x Q̃_x V_x†.
        let y_a = seg_a.from_eigenbasis(&kern_a.q_tilde);
        let y_b = seg_b.from_eigenbasis(&kern_b.q_tilde);
        let z = &y_a + linalg::conjugate_by(&u_a, &y_b).map(|v| v * decay_a);

        // Reduce to the system factor: M_{s,s'} = Σ_{e,e'} Z_{(se),(s'e')} ρE_{e',e}.
        let env = rho_e0.matrix();
        let mut m_kernel = CMatrix::zeros(8, 8);
        for s in 0..8 {
            for sp in 0..8 {
                let mut acc = Complex64::ZERO;
                for e in 0..8 {
                    for ep in 0..8 {
                        acc += z[(s * 8 + e, sp * 8 + ep)] * env[(ep, e)];
                    }
                }
                m_kernel[(s, sp)] = acc;
            }
        }

        // Per-iteration system map Φ: vec(ρ') = Φ vec(ρ) with column-major
        // vec. Column for E_{r,c}: Tr_E[ W (E_{r,c} ⊗ ρE) W† ] · e^{-kT}.
        let mut phi = CMatrix::zeros(64, 64);
        let mut block = CMatrix::zeros(DIM, 8);
        for c in 0..8 {
            for r in 0..8 {
                // block = W[:, r*8..r*8+8] · ρE
                for ecol in 0..8 {
                    for u in 0..DIM {
                        let mut acc = Complex64::ZERO;
                        for e in 0..8 {
                            acc += w_full[(u, r * 8 + e)] * env[(e, ecol)];
                        }
                        block[(u, ecol)] = acc;
                    }
                }
                // out_{s,s'} = Σ_e Σ_{e'} block_{s*8+e, e'} conj(W_{s'*8+e, c*8+e'})
                for sp in 0..8 {
                    for s in 0..8 {
                        let mut acc = Complex64::ZERO;
                        for e in 0..8 {
                            for ep in 0..8 {
                                acc += block[(s * 8 + e, ep)] * w_full[(sp * 8 + e, c * 8 + ep)].conj();
                            }
                        }
                        phi[(sp * 8 + s, c * 8 + r)] = acc * decay_t;
                    }
                }
            }
        }

        // Geometric series S = Σ_{n<N} Φⁿ = (I-Φ)⁻¹ (I-Φ^N), spectral radius
        // of Φ is e^{-kT} < 1.
        let ident = linalg::identity(64);
        let phi_n = matrix_power(&phi, periods);
        let lu = (&ident - &phi).lu();
        let series = lu.solve(&(&ident - &phi_n)).ok_or_else(|| {
            SensorError::numerical("geometric-series solve failed".to_string())
        })?;

        // φ(ρ₀) = Σ_n tr[M ρ_n] = Σ_idx w_idx vec(ρ₀)_idx with w = Sᵀ m,
        // m_{c*8+r} = M_{c,r} (plain transpose, no conjugation).
        let mut m_vec = DVector::from_element(64, Complex64::ZERO);
        for s in 0..8 {
            for sp in 0..8 {
                m_vec[s * 8 + sp] = m_kernel[(s, sp)];
            }
        }
        let functional = series.transpose() * m_vec;
        Ok(YieldMap { functional })
    }

    /// φ_singlet for an initial 8-dim system state.
    pub fn singlet_yield(&self, rho_s0: &DensityMatrix) -> Result<f64> {
        if rho_s0.dim() != 8 {
            return Err(SensorError::rejected(format!(
                "system state must be 8-dimensional, got {}",
                rho_s0.dim()
            )));
        }
        let m = rho_s0.matrix();
        let mut acc = Complex64::ZERO;
        for c in 0..8 {
            for r in 0..8 {
                acc += self.functional[c * 8 + r] * m[(r, c)];
            }
        }
        if acc.im.abs() > IMAG_TOL {
            return Err(SensorError::numerical(format!(
                "yield has imaginary part {:.3e}",
                acc.im
            )));
        }
        Ok(acc.re)
    }
}

fn matrix_power(m: &CMatrix, mut n: usize) -> CMatrix {
    let mut result = linalg::identity(m.nrows());
    let mut base = m.clone();
    while n > 0 {
        if n & 1 == 1 {
            result = linalg::mul(&result, &base);
        }
        base = linalg::mul(&base, &base);
        n >>= 1;
    }
    result
}

/// Weighted observable yield
/// (k/φ_singlet)·∫₀^∞ f(ρ(t))·tr[P ρ(t)] dt
/// via per-segment composite trapezoid quadrature with `n_sub` sub-intervals
/// per segment; φ_singlet is computed by the same quadrature in the same
/// pass, so the constant observable integrates to exactly 1.
pub fn weighted_yield(
    params: &SensorParams,
    rho_s0: &DensityMatrix,
    rho_e0: &DensityMatrix,
    angles: &FieldAngles,
    observable: &dyn StateObservable,
    n_sub: usize,
    eps_tail: f64,
) -> Result<f64> {
    let (phi, values) = weighted_yields_multi(
        params,
        rho_s0,
        rho_e0,
        angles,
        &[observable],
        n_sub,
        eps_tail,
    )?;
    let _ = phi;
    Ok(values[0])
}

/// Evaluate several observable yields in one engine pass. Returns the
/// quadrature φ_singlet and the normalized observable yields.
pub fn weighted_yields_multi(
    params: &SensorParams,
    rho_s0: &DensityMatrix,
    rho_e0: &DensityMatrix,
    angles: &FieldAngles,
    observables: &[&dyn StateObservable],
    n_sub: usize,
    eps_tail: f64,
) -> Result<(f64, Vec<f64>)> {
    params.validate()?;
    check_initial_states(rho_s0, rho_e0)?;
    if n_sub == 0 {
        return Err(SensorError::rejected(
            "quadrature requires n_sub ≥ 1".to_string(),
        ));
    }
    let (seg_a, seg_b) = segment_propagators(params, angles)?;
    let proj = model::singlet_projector().to_dense();
    let kern_a = SegmentKernel::new(&seg_a, &proj, params.k, params.tau_se);
    let kern_b = SegmentKernel::new(&seg_b, &proj, params.k, params.tau_ee);
    let periods = horizon_periods(params, eps_tail)?;

    let mut joint = rho_s0.tensor(rho_e0);
    let mut phi_quad = 0.0;
    let mut numerators = vec![0.0; observables.len()];
    for _ in 0..periods {
        let mid = quadrature_segment(
            &seg_a,
            &kern_a,
            &joint,
            params.tau_se,
            params.k,
            n_sub,
            observables,
            &mut phi_quad,
            &mut numerators,
        )?;
        let end = quadrature_segment(
            &seg_b,
            &kern_b,
            &mid,
            params.tau_ee,
            params.k,
            n_sub,
            observables,
            &mut phi_quad,
            &mut numerators,
        )?;
        let system = partial_trace(&end, &[0, 1, 2])?;
        joint = system.tensor(rho_e0);
    }
    if phi_quad < 1e-12 {
        return Err(SensorError::degenerate(format!(
            "quadrature singlet yield {phi_quad:.3e} too small to normalize"
        )));
    }
    Ok((
        phi_quad,
        numerators.iter().map(|n| n / phi_quad).collect(),
    ))
}

/// Trapezoid pass over one segment: accumulates k∫ w dt into `phi_quad` and
/// k∫ f·w dt into `numerators`, returning the segment-end state. Observable
/// evaluations at the nodes run in parallel and are reduced in node order.
#[allow(clippy::too_many_arguments)]
fn quadrature_segment(
    prop: &Propagator,
    kernel: &SegmentKernel,
    rho: &DensityMatrix,
    tau: f64,
    k: f64,
    n_sub: usize,
    observables: &[&dyn StateObservable],
    phi_quad: &mut f64,
    numerators: &mut [f64],
) -> Result<DensityMatrix> {
    let tilde0 = prop.to_eigenbasis(rho.matrix());
    let h = tau / n_sub as f64;
    // Node states in the lab basis, with their trapezoid coefficients.
    let nodes: Vec<(f64, CMatrix)> = (0..=n_sub)
        .map(|j| {
            let coeff = if j == 0 || j == n_sub { 0.5 } else { 1.0 };
            let mut t = tilde0.clone();
            prop.phase_evolve_in_basis(&mut t, h * j as f64, k);
            (coeff, t)
        })
        .collect();

    let mut weights = Vec::with_capacity(nodes.len());
    for (_, t) in nodes.iter() {
        weights.push(kernel.weight(t)?);
    }

    if !observables.is_empty() {
        let trace0 = rho.trace();
        let lab_states: Vec<DensityMatrix> = nodes
            .par_iter()
            .enumerate()
            .map(|(j, (_, t))| {
                let lab = prop.from_eigenbasis(t);
                DensityMatrix::from_parts_unchecked(lab, trace0 * (-k * h * j as f64).exp())
            })
            .collect();
        let evals: Vec<Result<Vec<f64>>> = lab_states
            .par_iter()
            .map(|state| {
                observables
                    .iter()
                    .map(|obs| obs.evaluate(state))
                    .collect::<Result<Vec<f64>>>()
            })
            .collect();
        for (j, per_node) in evals.into_iter().enumerate() {
            let per_node = per_node?;
            let c = nodes[j].0;
            for (acc, f) in numerators.iter_mut().zip(per_node.iter()) {
                *acc += k * h * c * f * weights[j];
            }
        }
    }

    for (j, (c, _)) in nodes.iter().enumerate() {
        *phi_quad += k * h * c * weights[j];
    }

    let (_, last) = nodes.into_iter().last().expect("n_sub ≥ 1");
    let out = prop.from_eigenbasis(&last);
    Ok(DensityMatrix::from_parts_unchecked(
        out,
        rho.trace() * (-k * tau).exp(),
    ))
}

/// One grid point of an angle scan.
#[derive(Clone, Debug)]
pub struct ScanPoint {
    pub angles: FieldAngles,
    pub singlet_yield: f64,
    /// Auxiliary observable yields, in the order requested.
    pub aux: Vec<f64>,
}

/// Yields tabulated over a (θ, φ) grid, ordered by (i_phi, i_theta).
#[derive(Clone, Debug)]
pub struct ScanResult {
    pub points: Vec<ScanPoint>,
    pub n_theta: usize,
    pub n_phi: usize,
    pub aux_names: Vec<String>,
}

/// Anisotropy statistics of a scan.
#[derive(Clone, Copy, Debug)]
pub struct AnisotropyStats {
    /// Absolute anisotropy: max − min over the grid.
    pub delta: f64,
    /// Relative anisotropy Δ / ⟨φ⟩.
    pub ra: f64,
    /// Orientation-averaged yield (sinφ-weighted spherical mean).
    pub mean: f64,
    /// Δ × ⟨φ⟩, balancing variation against overall recombination.
    pub objective: f64,
}

/// Angle grid θ_j = 2πj/n_theta, φ_i = πi/(n_phi−1), ordered (i_phi, i_theta).
pub fn angle_grid(n_theta: usize, n_phi: usize) -> Vec<FieldAngles> {
    let mut grid = Vec::with_capacity(n_theta * n_phi);
    for i in 0..n_phi {
        let phi = std::f64::consts::PI * i as f64 / (n_phi - 1) as f64;
        for j in 0..n_theta {
            let theta = std::f64::consts::TAU * j as f64 / n_theta as f64;
            grid.push(FieldAngles::new(theta, phi));
        }
    }
    grid
}

/// Evaluate φ_singlet (plus any requested observable yields) on the full
/// grid. Grid points are independent and run in parallel; output order is
/// deterministic by (i_phi, i_theta).
#[allow(clippy::too_many_arguments)]
pub fn angle_scan(
    params: &SensorParams,
    rho_s0: &DensityMatrix,
    rho_e0: &DensityMatrix,
    n_theta: usize,
    n_phi: usize,
    observables: &[&dyn StateObservable],
    n_sub: usize,
    eps_tail: f64,
) -> Result<ScanResult> {
    if n_theta < 4 || n_phi < 3 {
        return Err(SensorError::rejected(format!(
            "grid must be at least 4x3, got {n_theta}x{n_phi}"
        )));
    }
    params.validate()?;
    check_initial_states(rho_s0, rho_e0)?;
    let grid = angle_grid(n_theta, n_phi);

    let points: Result<Vec<ScanPoint>> = grid
        .par_iter()
        .map(|angles| {
            let (phi_singlet, aux) = if observables.is_empty() {
                let map = YieldMap::build(params, angles, rho_e0, eps_tail)?;
                (map.singlet_yield(rho_s0)?, Vec::new())
            } else {
                let map = YieldMap::build(params, angles, rho_e0, eps_tail)?;
                let phi = map.singlet_yield(rho_s0)?;
                let (_, aux) = weighted_yields_multi(
                    params, rho_s0, rho_e0, angles, observables, n_sub, eps_tail,
                )?;
                (phi, aux)
            };
            if !(-1e-9..=1.0 + 1e-9).contains(&phi_singlet) {
                return Err(SensorError::numerical(format!(
                    "singlet yield {phi_singlet} outside [0, 1] at theta={} phi={}",
                    angles.theta, angles.phi
                )));
            }
            Ok(ScanPoint {
                angles: *angles,
                singlet_yield: phi_singlet,
                aux,
            })
        })
        .collect();

    Ok(ScanResult {
        points: points?,
        n_theta,
        n_phi,
        aux_names: observables.iter().map(|o| o.name().to_string()).collect(),
    })
}

/// Scan many initial system states over one shared grid, reusing the
/// per-angle yield functionals. Returns one yield row per state, each in
/// grid order.
pub fn scan_many(
    params: &SensorParams,
    systems: &[DensityMatrix],
    rho_e0: &DensityMatrix,
    n_theta: usize,
    n_phi: usize,
    eps_tail: f64,
) -> Result<Vec<Vec<f64>>> {
    if n_theta < 4 || n_phi < 3 {
        return Err(SensorError::rejected(format!(
            "grid must be at least 4x3, got {n_theta}x{n_phi}"
        )));
    }
    let grid = angle_grid(n_theta, n_phi);
    let maps: Result<Vec<YieldMap>> = grid
        .par_iter()
        .map(|angles| YieldMap::build(params, angles, rho_e0, eps_tail))
        .collect();
    let maps = maps?;
    systems
        .par_iter()
        .map(|rho_s0| {
            maps.iter()
                .map(|m| m.singlet_yield(rho_s0))
                .collect::<Result<Vec<f64>>>()
        })
        .collect()
}

/// Anisotropy statistics. The orientation average uses a self-normalized
/// sinφ-weighted trapezoid rule in φ and the periodic rectangle rule in θ,
/// so a constant scan averages to exactly that constant.
pub fn anisotropy(scan: &ScanResult) -> Result<AnisotropyStats> {
    anisotropy_of_grid(
        &scan
            .points
            .iter()
            .map(|p| p.singlet_yield)
            .collect::<Vec<f64>>(),
        scan.n_theta,
        scan.n_phi,
    )
}

/// Anisotropy statistics from a raw yield row in (i_phi, i_theta) order.
pub fn anisotropy_of_grid(yields: &[f64], n_theta: usize, n_phi: usize) -> Result<AnisotropyStats> {
    if yields.is_empty() || yields.len() != n_theta * n_phi {
        return Err(SensorError::rejected(format!(
            "grid size mismatch: {} values for {}x{}",
            yields.len(),
            n_theta,
            n_phi
        )));
    }
    let max = yields.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = yields.iter().copied().fold(f64::INFINITY, f64::min);
    let delta = max - min;

    let mut weighted = 0.0;
    let mut weight_sum = 0.0;
    for i in 0..n_phi {
        let phi = std::f64::consts::PI * i as f64 / (n_phi - 1) as f64;
        let trap = if i == 0 || i == n_phi - 1 { 0.5 } else { 1.0 };
        let w = trap * phi.sin();
        for j in 0..n_theta {
            weighted += w * yields[i * n_theta + j];
            weight_sum += w;
        }
    }
    if weight_sum < 1e-12 {
        return Err(SensorError::degenerate(
            "angle grid has no interior weight".to_string(),
        ));
    }
    let mean = weighted / weight_sum;
    if mean < 1e-12 {
        return Err(SensorError::degenerate(format!(
            "orientation-averaged yield {mean:.3e} too small to normalize"
        )));
    }
    Ok(AnisotropyStats {
        delta,
        ra: delta / mean,
        mean,
        objective: delta * mean,
    })
}
