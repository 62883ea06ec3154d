//! Numerical certification of the structural commutator results behind the
//! sensor: the Zeeman-commutant state family, unitality of the collision map,
//! the three necessity conditions, and the interaction-structure checks.
//!
//! Every check runs in the exact Pauli algebra; dense-matrix twins of the
//! same commutators are exercised in the tests and on the first sample of
//! each batch. "For all angles" is decided on a deterministic angle set: the
//! six coordinate axes plus Fibonacci-sphere points, which covers the axis
//! cases the structural arguments reduce to plus generic directions.
//! Nonvanishing directions are certified on sampled instances, never proved.

use nalgebra::linalg::SymmetricEigen;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::error::SensorError;
use crate::linalg::{self, CMatrix};
use crate::model::{self, FieldAngles, SensorParams};
use crate::pauli::{commutator, Pauli, PauliString, PauliSum, IDENTITY_LABELS};
use crate::states::DensityMatrix;
use crate::Result;

/// Residual below which a commutator counts as exactly zero.
pub const ZERO_TOL: f64 = 1e-12;
/// Residual above which a commutator counts as certainly nonzero.
pub const NONZERO_TOL: f64 = 1e-10;

/// Coefficients of the Zeeman-commutant family
/// 1/8 + p_ab σ⃗^A·σ⃗^B + p_ac σ⃗^A·σ⃗^C + p_bc σ⃗^B·σ⃗^C
///     + p_abc (cyclic − anticyclic triples).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrivialStateParams {
    pub p_ab: f64,
    pub p_ac: f64,
    pub p_bc: f64,
    pub p_abc: f64,
}

impl TrivialStateParams {
    pub fn new(p_ab: f64, p_ac: f64, p_bc: f64, p_abc: f64) -> Self {
        TrivialStateParams {
            p_ab,
            p_ac,
            p_bc,
            p_abc,
        }
    }
}

fn pauli3(a: Pauli, b: Pauli, c: Pauli) -> CMatrix {
    linalg::kron_list(&[&a.matrix(), &b.matrix(), &c.matrix()])
}

/// Dense 8x8 matrix of the commutant-family combination for unit
/// coefficients; scaled by the p's in [`trivial_state`].
fn family_basis() -> [CMatrix; 4] {
    use Pauli::{X, Y, Z};
    let axes = [X, Y, Z];
    let mut ab = CMatrix::zeros(8, 8);
    let mut ac = CMatrix::zeros(8, 8);
    let mut bc = CMatrix::zeros(8, 8);
    for &i in axes.iter() {
        ab += pauli3(i, i, Pauli::I);
        ac += pauli3(i, Pauli::I, i);
        bc += pauli3(Pauli::I, i, i);
    }
    let triple = pauli3(X, Y, Z) + pauli3(Z, X, Y) + pauli3(Y, Z, X)
        - pauli3(X, Z, Y)
        - pauli3(Y, X, Z)
        - pauli3(Z, Y, X);
    [ab, ac, bc, triple]
}

/// Construct the unit-trace 8-dim state of the commutant family; rejects
/// parameters whose matrix is not positive semidefinite (floor -1e-10),
/// reporting the offending eigenvalue.
pub fn trivial_state(tp: &TrivialStateParams) -> Result<DensityMatrix> {
    let [ab, ac, bc, triple] = family_basis();
    let m = linalg::identity(8).map(|z| z / 8.0)
        + ab.map(|z| z * tp.p_ab)
        + ac.map(|z| z * tp.p_ac)
        + bc.map(|z| z * tp.p_bc)
        + triple.map(|z| z * tp.p_abc);
    let min_eig = SymmetricEigen::new(m.clone())
        .eigenvalues
        .iter()
        .fold(f64::INFINITY, |acc, &v| acc.min(v));
    if min_eig < -1e-10 {
        return Err(SensorError::rejected(format!(
            "trivial-state parameters are not PSD: minimum eigenvalue {min_eig:.6e}"
        )));
    }
    DensityMatrix::new(m)
}

/// Rejection-sample parameters with a PSD state. The admissible region is
/// not characterized analytically; the box is sized for a useful accept rate.
pub fn sample_trivial_params<R: Rng>(rng: &mut R) -> TrivialStateParams {
    loop {
        let tp = TrivialStateParams::new(
            rng.random_range(-0.09..0.09),
            rng.random_range(-0.09..0.09),
            rng.random_range(-0.09..0.09),
            rng.random_range(-0.09..0.09),
        );
        if trivial_state(&tp).is_ok() {
            return tp;
        }
    }
}

/// Hilbert-Schmidt distance from ρ to the span of the commutant family
/// (identity plus the four combinations). States well outside the span
/// cannot commute with the Zeeman term at all angles.
pub fn family_projection_residual(rho: &DensityMatrix) -> f64 {
    assert_eq!(rho.dim(), 8);
    let mut basis: Vec<CMatrix> = vec![linalg::identity(8)];
    basis.extend(family_basis());
    // The five basis elements are mutually HS-orthogonal.
    let mut residual = rho.matrix().clone();
    for b in basis.iter() {
        let norm_sq: f64 = b.iter().map(|z| z.norm_sqr()).sum();
        let overlap: Complex64 = b
            .iter()
            .zip(residual.iter())
            .map(|(x, y)| x.conj() * y)
            .sum();
        let coeff = overlap / norm_sq;
        residual -= b.map(|z| z * coeff);
    }
    linalg::fro_norm(&residual)
}

/// Deterministic angle set: the six coordinate axes followed by
/// Fibonacci-sphere points, `n` angles in total (n ≥ 6).
pub fn angle_set(n: usize) -> Vec<FieldAngles> {
    use std::f64::consts::{FRAC_PI_2, PI};
    let mut set = vec![
        FieldAngles::new(0.0, 0.0),          // +z
        FieldAngles::new(0.0, PI),           // -z
        FieldAngles::new(0.0, FRAC_PI_2),    // +x
        FieldAngles::new(PI, FRAC_PI_2),     // -x
        FieldAngles::new(FRAC_PI_2, FRAC_PI_2), // +y
        FieldAngles::new(3.0 * FRAC_PI_2, FRAC_PI_2), // -y
    ];
    let extra = n.saturating_sub(set.len());
    let golden = PI * (3.0 - 5.0_f64.sqrt());
    for i in 0..extra {
        let z = 1.0 - 2.0 * (i as f64 + 0.5) / extra as f64;
        let phi = z.acos();
        let theta = (golden * i as f64).rem_euclid(std::f64::consts::TAU);
        set.push(FieldAngles::new(theta, phi));
    }
    set.truncate(n.max(6));
    set
}

/// ρ ⊗ 1_E embedded on the six sites as an exact Pauli sum.
fn embed_system_operator(rho: &DensityMatrix) -> Result<PauliSum> {
    PauliSum::from_dense_on_sites(rho.matrix(), &[0, 1, 2])
}

/// Maximum Frobenius norm of [ρ ⊗ 1_E, H_B(θ,φ)] over the angle set, in the
/// exact Pauli algebra. Commutant-family states return ≤ 1e-12.
pub fn check_zeeman_commutant(
    rho: &DensityMatrix,
    params: &SensorParams,
    angles: &[FieldAngles],
) -> Result<f64> {
    if rho.dim() != 8 {
        return Err(SensorError::rejected(format!(
            "check_zeeman_commutant expects an 8-dim system state, got {}",
            rho.dim()
        )));
    }
    let rho_op = embed_system_operator(rho)?;
    let mut worst = 0.0_f64;
    for a in angles.iter() {
        let hb = model::h_zeeman(params, a);
        worst = worst.max(commutator(&rho_op, &hb).fro_norm());
    }
    Ok(worst)
}

/// The three necessity flags for nontrivial sensing, each true when the
/// corresponding commutator is nonvanishing (norm > 1e-10 at ≥ 1 angle):
/// [ρ_SE(0), H₀+V+H_B], [P_singlet, H₀+V], [H_B, H₀+V].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NecessityFlags {
    pub state_noncommuting: bool,
    pub projector_noncommuting: bool,
    pub zeeman_noncommuting: bool,
}

/// Evaluate the necessity flags for a given joint initial state (64-dim).
pub fn necessity_flags(
    params: &SensorParams,
    rho_se: &DensityMatrix,
    angles: &[FieldAngles],
) -> Result<NecessityFlags> {
    if rho_se.dim() != 64 {
        return Err(SensorError::rejected(format!(
            "necessity_flags expects the 64-dim joint state, got {}",
            rho_se.dim()
        )));
    }
    let h0_v = model::h_exchange(params).add(&model::v_interaction(params));
    let rho_op = PauliSum::from_dense(rho_se.matrix())?;
    let proj = model::singlet_projector();

    let fixed_part = commutator(&rho_op, &h0_v);
    let state_noncommuting = angles.iter().any(|a| {
        let hb = model::h_zeeman(params, a);
        fixed_part.add(&commutator(&rho_op, &hb)).fro_norm() > NONZERO_TOL
    });
    let projector_noncommuting = commutator(&proj, &h0_v).fro_norm() > NONZERO_TOL;
    let zeeman_noncommuting = angles.iter().any(|a| {
        let hb = model::h_zeeman(params, a);
        commutator(&hb, &h0_v).fro_norm() > NONZERO_TOL
    });
    Ok(NecessityFlags {
        state_noncommuting,
        projector_noncommuting,
        zeeman_noncommuting,
    })
}

/// Outcome of one certification check. `residual` is the quantity compared
/// against the threshold: the worst (largest) norm for should-vanish checks,
/// the weakest (smallest) certified norm for should-not-vanish checks.
#[derive(Clone, Debug)]
pub struct CertCheck {
    pub name: String,
    pub samples: usize,
    pub residual: f64,
    pub passed: bool,
}

impl CertCheck {
    fn zero_check(name: &str, samples: usize, worst: f64) -> Self {
        CertCheck {
            name: name.to_string(),
            samples,
            residual: worst,
            passed: worst <= ZERO_TOL,
        }
    }

    fn nonzero_check(name: &str, samples: usize, weakest: f64) -> Self {
        CertCheck {
            name: name.to_string(),
            samples,
            residual: weakest,
            passed: weakest > NONZERO_TOL,
        }
    }

    pub fn summary_line(&self) -> String {
        format!(
            "{} {} {:.6e} {}",
            self.name,
            self.samples,
            self.residual,
            if self.passed { "pass" } else { "FAIL" }
        )
    }
}

/// Aggregated verification results.
#[derive(Clone, Debug, Default)]
pub struct VerificationReport {
    pub checks: Vec<CertCheck>,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        for c in self.checks.iter() {
            s.push_str(&c.summary_line());
            s.push('\n');
        }
        s
    }
}

/// Random unit-trace 8-dim density matrix (Wishart-style).
pub fn random_density_8<R: Rng>(rng: &mut R) -> DensityMatrix {
    let g = CMatrix::from_fn(8, 8, |_, _| {
        Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
    });
    let m = linalg::mul(&g, &g.adjoint());
    let tr: f64 = (0..8).map(|i| m[(i, i)].re).sum();
    DensityMatrix::new(m.map(|z| z / tr)).expect("Wishart construction is a valid state")
}

/// Random Hermitian Pauli sum supported on the system sites.
fn random_system_hamiltonian<R: Rng>(rng: &mut R, terms: usize) -> PauliSum {
    let mut sum = PauliSum::zero();
    for _ in 0..terms {
        let mut labels = IDENTITY_LABELS;
        for label in labels.iter_mut().take(3) {
            *label = Pauli::ALL[rng.random_range(0..4)];
        }
        sum.add_term(PauliString::new(
            labels,
            Complex64::new(rng.random_range(-1.0..1.0), 0.0),
        ));
    }
    sum
}

/// Random collision interaction Σ_α Σ_ij g_ij σ_i^α ⊗ σ_j^{E_α} with at
/// least one genuine two-body term per pair.
fn random_interaction<R: Rng>(rng: &mut R) -> PauliSum {
    let mut sum = PauliSum::zero();
    for alpha in 0..3 {
        let mut has_cross = false;
        let mut g = [[0.0f64; 4]; 4];
        for (i, row) in g.iter_mut().enumerate() {
            for (j, item) in row.iter_mut().enumerate() {
                *item = rng.random_range(-1.0..1.0);
                if i != 0 && j != 0 && item.abs() > 0.05 {
                    has_cross = true;
                }
            }
        }
        if !has_cross {
            g[3][1] = 1.0;
        }
        for (i, row) in g.iter().enumerate() {
            for (j, &coeff) in row.iter().enumerate() {
                if coeff == 0.0 {
                    continue;
                }
                let mut labels = IDENTITY_LABELS;
                labels[alpha] = Pauli::ALL[i];
                labels[3 + alpha] = Pauli::ALL[j];
                sum.add_term(PauliString::new(labels, Complex64::new(coeff, 0.0)));
            }
        }
    }
    sum
}

/// A strictly local operator (no system-environment cross terms).
fn random_local_operator<R: Rng>(rng: &mut R) -> PauliSum {
    let mut sum = PauliSum::zero();
    for _ in 0..6 {
        let site = rng.random_range(0..6);
        let p = Pauli::ALL[rng.random_range(1..4)];
        sum.add_term(PauliString::single(
            site,
            p,
            Complex64::new(rng.random_range(-1.0..1.0), 0.0),
        ));
    }
    sum
}

/// Certify that random non-maximally-mixed system states fail to commute
/// with the full generator at some angle, while 1/8 commutes at every angle.
pub fn verify_generator_commutant(
    params: &SensorParams,
    n_samples: usize,
    angles: &[FieldAngles],
    seed: u64,
) -> Result<(CertCheck, CertCheck)> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let h0_v = model::h_exchange(params).add(&model::v_interaction(params));

    let mut weakest = f64::INFINITY;
    for _ in 0..n_samples {
        let rho = loop {
            let r = random_density_8(&mut rng);
            let dist = linalg::fro_norm(
                &(r.matrix() - DensityMatrix::maximally_mixed(8).matrix()),
            );
            if dist > 1e-3 {
                break r;
            }
        };
        // ρ_S ⊗ 1_E/8 embedded exactly.
        let rho_op = embed_system_operator(&rho)?.scale(Complex64::new(1.0 / 8.0, 0.0));
        let fixed = commutator(&rho_op, &h0_v);
        let mut found = 0.0_f64;
        for a in angles.iter() {
            let hb = model::h_zeeman(params, a);
            let norm = fixed.add(&commutator(&rho_op, &hb)).fro_norm();
            found = found.max(norm);
            if found > NONZERO_TOL {
                break;
            }
        }
        weakest = weakest.min(found);
    }
    let forward = CertCheck::nonzero_check("generator_commutant_nonmixed", n_samples, weakest);

    let mixed_op = PauliSum::identity().scale(Complex64::new(1.0 / 64.0, 0.0));
    let mut worst = commutator(&mixed_op, &h0_v).fro_norm();
    for a in angles.iter() {
        let hb = model::h_zeeman(params, a);
        worst = worst.max(commutator(&mixed_op, &hb).fro_norm());
    }
    let reverse = CertCheck::zero_check("generator_commutant_mixed", angles.len(), worst);
    Ok((forward, reverse))
}

/// Certify the interaction structure on random collision couplings: the
/// singlet projector never commutes with a genuine interaction, no system
/// Hamiltonian can cancel that commutator, the Zeeman term never commutes
/// with the interaction part, and strictly local operators do commute with
/// the projector when they avoid its support.
pub fn verify_interaction_structure(
    params: &SensorParams,
    n_random_v: usize,
    angles: &[FieldAngles],
    seed: u64,
) -> Result<Vec<CertCheck>> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let proj = model::singlet_projector();

    let mut weakest6 = f64::INFINITY;
    let mut weakest7 = f64::INFINITY;
    let mut weakest8 = f64::INFINITY;
    for _ in 0..n_random_v {
        let v = random_interaction(&mut rng);
        weakest6 = weakest6.min(commutator(&proj, &v).fro_norm());

        let h0 = random_system_hamiltonian(&mut rng, 8);
        weakest7 = weakest7.min(commutator(&proj, &h0.add(&v)).fro_norm());

        let mut found = 0.0_f64;
        for a in angles.iter() {
            let hb = model::h_zeeman(params, a);
            found = found.max(commutator(&hb, &h0.add(&v)).fro_norm());
            if found > NONZERO_TOL {
                break;
            }
        }
        weakest8 = weakest8.min(found);
    }

    // Converse: operators local on environment sites (e.g. σ_x^{E_A}) or on
    // site C commute with the (A,B) projector exactly.
    let mut worst_local = 0.0_f64;
    for _ in 0..n_random_v.max(1) {
        let local_env = {
            let mut s = random_local_operator(&mut rng);
            // keep only terms outside the projector support (sites 0, 1)
            s = PauliSum::from_terms(s.terms().filter_map(|(l, c)| {
                if l[0] == Pauli::I && l[1] == Pauli::I {
                    Some(PauliString::new(*l, *c))
                } else {
                    None
                }
            }));
            s
        };
        worst_local = worst_local.max(commutator(&proj, &local_env).fro_norm());
    }

    // The two model interactions are genuine interactions as well.
    for p in [
        SensorParams::default(),
        SensorParams::swap_defaults(),
    ] {
        let v = model::v_interaction(&p);
        weakest6 = weakest6.min(commutator(&proj, &v).fro_norm());
    }
    let _ = params;

    Ok(vec![
        CertCheck::nonzero_check("singlet_vs_interaction", n_random_v + 2, weakest6),
        CertCheck::nonzero_check("no_system_cancellation", n_random_v, weakest7),
        CertCheck::nonzero_check("zeeman_vs_interaction", n_random_v, weakest8),
        CertCheck::zero_check("local_operators_commute", n_random_v, worst_local),
    ])
}

/// Total-spin symmetry of an exchange-type Hamiltonian: [H, Σ_α σ_i^α] = 0
/// for i = x, y, z. Takes the operator as input so fault injection can be
/// exercised.
pub fn spin_symmetry_check(h: &PauliSum) -> CertCheck {
    let mut worst = 0.0_f64;
    for axis in [Pauli::X, Pauli::Y, Pauli::Z] {
        let total = model::total_system_spin(axis);
        worst = worst.max(commutator(h, &total).fro_norm());
    }
    CertCheck::zero_check("hex_spin_symmetry", 3, worst)
}

/// Unitality of the full collision map on random segment generators: the
/// scaled maximally mixed state must map to itself up to e^{-kT}.
pub fn unitality_check(params: &SensorParams, n_pairs: usize, seed: u64) -> Result<CertCheck> {
    use crate::dynamics::{evolve_segment, Propagator};
    use crate::states::partial_trace;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut worst = 0.0_f64;
    let mixed_env = DensityMatrix::maximally_mixed(8);
    for _ in 0..n_pairs {
        let h_a = random_dense_hermitian(&mut rng);
        let h_b = random_dense_hermitian(&mut rng);
        let prop_a = Propagator::from_dense(&h_a)?;
        let prop_b = Propagator::from_dense(&h_b)?;
        let joint = DensityMatrix::maximally_mixed(64);
        let mid = evolve_segment(&joint, &prop_a, params.tau_se, params.k);
        let end = evolve_segment(&mid, &prop_b, params.tau_ee, params.k);
        let refreshed = partial_trace(&end, &[0, 1, 2])?.tensor(&mixed_env);
        let expect = (-params.k * params.period()).exp();
        let target = DensityMatrix::maximally_mixed(64)
            .matrix()
            .map(|z| z * expect);
        worst = worst.max(linalg::max_abs_diff(refreshed.matrix(), &target));
    }
    Ok(CertCheck::zero_check("collision_map_unitality", n_pairs, worst))
}

fn random_dense_hermitian<R: Rng>(rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(64, 64, |_, _| {
        Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
    });
    linalg::hermitize(&g)
}

/// Configuration of the certification suite.
#[derive(Clone, Copy, Debug)]
pub struct VerificationConfig {
    /// Sampled instances per check.
    pub samples: usize,
    /// Total angles in the deterministic angle set (≥ 6).
    pub angles: usize,
    pub seed: u64,
}

impl Default for VerificationConfig {
    fn default() -> Self {
        VerificationConfig {
            samples: 100,
            angles: 100,
            seed: 2024,
        }
    }
}

/// Run every certification check with the reference model parameters.
pub fn run_full_verification(cfg: &VerificationConfig) -> Result<VerificationReport> {
    let params = SensorParams::default();
    let angles = angle_set(cfg.angles);
    let mut rng = ChaCha12Rng::seed_from_u64(cfg.seed);
    let mut checks = Vec::new();

    // The commutant family commutes with the Zeeman term at all angles;
    // generic states do not.
    let mut worst_family = 0.0_f64;
    for _ in 0..cfg.samples {
        let tp = sample_trivial_params(&mut rng);
        let rho = trivial_state(&tp)?;
        worst_family = worst_family.max(check_zeeman_commutant(&rho, &params, &angles)?);
    }
    checks.push(CertCheck::zero_check(
        "zeeman_commutant_family",
        cfg.samples,
        worst_family,
    ));

    let mut weakest_generic = f64::INFINITY;
    let mut counted = 0usize;
    while counted < cfg.samples {
        let rho = random_density_8(&mut rng);
        if family_projection_residual(&rho) < 1e-3 {
            continue;
        }
        counted += 1;
        weakest_generic =
            weakest_generic.min(check_zeeman_commutant(&rho, &params, &angles)?);
    }
    let mut generic = CertCheck::nonzero_check("zeeman_commutant_generic", cfg.samples, weakest_generic);
    // Generic states must exceed a much stronger floor than the structural
    // nonzero tolerance.
    generic.passed = weakest_generic > 1e-6;
    checks.push(generic);

    // Unitality of the full collision map.
    checks.push(unitality_check(&params, 20, cfg.seed.wrapping_add(1))?);

    // Necessity flags on sampled product states ρ_S ⊗ 1/8.
    let mut all_flags_ok = true;
    let mut flag_samples = 0usize;
    for _ in 0..cfg.samples {
        let rho_s = random_density_8(&mut rng);
        let joint = rho_s.tensor(&DensityMatrix::maximally_mixed(8));
        let flags = necessity_flags(&params, &joint, &angles)?;
        flag_samples += 1;
        if !(flags.state_noncommuting && flags.projector_noncommuting && flags.zeeman_noncommuting)
        {
            all_flags_ok = false;
        }
    }
    // The maximally mixed joint state must drop exactly the first flag.
    let mixed_flags = necessity_flags(
        &params,
        &DensityMatrix::maximally_mixed(64),
        &angles,
    )?;
    let mixed_ok = !mixed_flags.state_noncommuting
        && mixed_flags.projector_noncommuting
        && mixed_flags.zeeman_noncommuting;
    checks.push(CertCheck {
        name: "necessity_flags".to_string(),
        samples: flag_samples + 1,
        residual: if all_flags_ok && mixed_ok { 0.0 } else { 1.0 },
        passed: all_flags_ok && mixed_ok,
    });

    // Interaction-structure checks plus the local converse.
    checks.extend(verify_interaction_structure(
        &params,
        cfg.samples,
        &angles,
        cfg.seed.wrapping_add(2),
    )?);

    // Commutant of the full generator, both directions.
    let (forward, reverse) = verify_generator_commutant(
        &params,
        cfg.samples,
        &angles,
        cfg.seed.wrapping_add(3),
    )?;
    checks.push(forward);
    checks.push(reverse);

    // Exchange symmetry (the mutation target).
    checks.push(spin_symmetry_check(&model::h_exchange(&params)));

    Ok(VerificationReport { checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::partial_trace;
    use approx::assert_abs_diff_eq;

    #[test]
    fn trivial_state_zero_params_is_mixed() {
        let rho = trivial_state(&TrivialStateParams::new(0.0, 0.0, 0.0, 0.0)).unwrap();
        assert!(
            linalg::max_abs_diff(rho.matrix(), DensityMatrix::maximally_mixed(8).matrix())
                < 1e-15
        );
    }

    #[test]
    fn trivial_state_singlet_weighted_pair() {
        // p_ab = -1/24 tilts toward the (A,B) singlet and stays PSD.
        let rho = trivial_state(&TrivialStateParams::new(-1.0 / 24.0, 0.0, 0.0, 0.0)).unwrap();
        assert!(rho.min_eigenvalue() > -1e-12);
        let worst = check_zeeman_commutant(
            &rho,
            &SensorParams::default(),
            &angle_set(50),
        )
        .unwrap();
        assert!(worst < 1e-12, "commutant residual {worst}");
    }

    #[test]
    fn trivial_state_reduced_states_are_mixed() {
        let mut rng = ChaCha12Rng::seed_from_u64(8);
        let tp = sample_trivial_params(&mut rng);
        let rho = trivial_state(&tp).unwrap();
        for site in 0..3 {
            let reduced = partial_trace(&rho, &[site]).unwrap();
            assert!(
                linalg::max_abs_diff(
                    reduced.matrix(),
                    DensityMatrix::maximally_mixed(2).matrix()
                ) < 1e-12
            );
        }
    }

    #[test]
    fn trivial_state_rejects_non_psd() {
        let err = trivial_state(&TrivialStateParams::new(0.4, 0.0, 0.0, 0.0));
        match err {
            Err(SensorError::RejectedInput(msg)) => {
                assert!(msg.contains("eigenvalue"), "message: {msg}");
            }
            other => panic!("expected rejection, got {other:?}"),
        }
    }

    #[test]
    fn mixed_state_commutes_everywhere() {
        let worst = check_zeeman_commutant(
            &DensityMatrix::maximally_mixed(8),
            &SensorParams::default(),
            &angle_set(20),
        )
        .unwrap();
        assert_abs_diff_eq!(worst, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn sampled_family_commutes_and_matches_dense_route() {
        let params = SensorParams::default();
        let angles = angle_set(20);
        let mut rng = ChaCha12Rng::seed_from_u64(15);
        for _ in 0..20 {
            let tp = sample_trivial_params(&mut rng);
            let rho = trivial_state(&tp).unwrap();
            let pauli_norm = check_zeeman_commutant(&rho, &params, &angles).unwrap();
            assert!(pauli_norm < 1e-12);

            // Dense twin at one axis angle.
            let a = &angles[2];
            let hb = model::h_zeeman(&params, a).to_dense();
            let rho_full = rho.tensor(&DensityMatrix::maximally_mixed(8));
            let big = rho_full.matrix().map(|z| z * 8.0); // ρ ⊗ 1_E
            let comm = linalg::mul(&big, &hb) - linalg::mul(&hb, &big);
            assert!(linalg::fro_norm(&comm) < 1e-12);
        }
    }

    #[test]
    fn pure_state_fails_commutant_at_x_axis() {
        let rho = DensityMatrix::basis_state(8, 0);
        let x_axis = vec![FieldAngles::new(0.0, std::f64::consts::FRAC_PI_2)];
        let worst =
            check_zeeman_commutant(&rho, &SensorParams::default(), &x_axis).unwrap();
        assert!(worst > 0.1, "expected strong violation, got {worst}");
    }

    #[test]
    fn generic_states_leave_the_family() {
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let params = SensorParams::default();
        let angles = angle_set(30);
        for _ in 0..20 {
            let rho = random_density_8(&mut rng);
            assert!(family_projection_residual(&rho) > 1e-3);
            let worst = check_zeeman_commutant(&rho, &params, &angles).unwrap();
            assert!(worst > 1e-6);
        }
    }

    #[test]
    fn necessity_flags_for_reference_model() {
        let params = SensorParams::default();
        let angles = angle_set(30);
        let q = crate::states::qubit_from_bloch(&crate::states::BlochVector::new(0.0, 0.0, 0.7))
            .unwrap();
        let sys = crate::states::composite_system(&q);
        let joint = sys.tensor(&DensityMatrix::maximally_mixed(8));
        let flags = necessity_flags(&params, &joint, &angles).unwrap();
        assert!(flags.state_noncommuting);
        assert!(flags.projector_noncommuting);
        assert!(flags.zeeman_noncommuting);

        let mixed = DensityMatrix::maximally_mixed(64);
        let flags = necessity_flags(&params, &mixed, &angles).unwrap();
        assert!(!flags.state_noncommuting);
        assert!(flags.projector_noncommuting);
        assert!(flags.zeeman_noncommuting);
    }

    #[test]
    fn projector_flag_drops_without_interaction() {
        // V_SE = 0 and H₀ = H_ex: the projector shares the SU(2) symmetry.
        let params = SensorParams {
            j_se_tau: 0.0,
            ..SensorParams::default()
        };
        let angles = angle_set(10);
        let mixed = DensityMatrix::maximally_mixed(64);
        let flags = necessity_flags(&params, &mixed, &angles).unwrap();
        assert!(!flags.projector_noncommuting);
    }

    #[test]
    fn generator_commutant_directions() {
        let params = SensorParams::default();
        let angles = angle_set(30);
        let (forward, reverse) = verify_generator_commutant(&params, 10, &angles, 5).unwrap();
        assert!(forward.passed, "forward residual {}", forward.residual);
        assert!(reverse.passed, "reverse residual {}", reverse.residual);
    }

    #[test]
    fn commutant_family_member_still_senses_generator() {
        // A Zeeman-commutant state commutes with H_B but not with H_ex+V_SE.
        let params = SensorParams::default();
        let rho = trivial_state(&TrivialStateParams::new(-1.0 / 24.0, 0.0, 0.0, 0.0)).unwrap();
        let rho_op = PauliSum::from_dense_on_sites(rho.matrix(), &[0, 1, 2])
            .unwrap()
            .scale(Complex64::new(1.0 / 8.0, 0.0));
        let h0_v = model::h_exchange(&params).add(&model::v_interaction(&params));
        let norm = commutator(&rho_op, &h0_v).fro_norm();
        assert!(norm > 1e-3, "expected nonzero commutator, got {norm}");
    }

    #[test]
    fn interaction_structure_passes_on_samples() {
        let params = SensorParams::default();
        let angles = angle_set(20);
        let checks = verify_interaction_structure(&params, 15, &angles, 11).unwrap();
        for c in checks.iter() {
            assert!(c.passed, "{} residual {}", c.name, c.residual);
        }
    }

    #[test]
    fn spin_symmetry_detects_tampering() {
        let params = SensorParams::default();
        let good = spin_symmetry_check(&model::h_exchange(&params));
        assert!(good.passed);

        // Flip the sign of one exchange term.
        let mut labels = IDENTITY_LABELS;
        labels[0] = Pauli::X;
        labels[1] = Pauli::X;
        let tampered = model::h_exchange(&params).add(&PauliSum::from(PauliString::new(
            labels,
            Complex64::new(1.0, 0.0),
        )));
        let bad = spin_symmetry_check(&tampered);
        assert!(!bad.passed, "tampering must flip the verdict");
    }

    #[test]
    fn unitality_check_passes() {
        let check = unitality_check(&SensorParams::default(), 5, 31).unwrap();
        assert!(check.passed, "unitality residual {}", check.residual);
    }

    #[test]
    fn angle_set_contains_axes() {
        let set = angle_set(100);
        assert_eq!(set.len(), 100);
        assert_eq!(set[0].phi, 0.0);
        assert_abs_diff_eq!(set[2].phi, std::f64::consts::FRAC_PI_2, epsilon = 1e-15);
    }

    #[test]
    fn pauli_and_dense_commutator_routes_agree() {
        let params = SensorParams::default();
        let a = model::h_exchange(&params).add(&model::v_interaction(&params));
        let b = model::h_zeeman(&params, &FieldAngles::new(0.7, 1.9));
        let pauli_norm = commutator(&a, &b).fro_norm();
        let da = a.to_dense();
        let db = b.to_dense();
        let dense = linalg::mul(&da, &db) - linalg::mul(&db, &da);
        assert_abs_diff_eq!(pauli_norm, linalg::fro_norm(&dense), epsilon = 1e-10);
    }
}
