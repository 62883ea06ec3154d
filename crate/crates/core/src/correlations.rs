//! Mutual information, measurement-optimized quantum discord, Holevo
//! information and objectivity diagnostics between the system radicals and
//! the current environment particles.
//!
//! Discord minimizes Σ p_i S(ρ_Y|i) over rank-1 von Neumann measurements on
//! the measured factor. Measurements are parametrized as U = exp(-iG) with G
//! Hermitian and refined by coordinate descent on the generator entries; the
//! returned value is an upper bound on the true discord (the optimization is
//! a heuristic) and is deterministic given the seed. Sub-normalized evolved
//! states are trace-normalized before any correlation measure; the global
//! decay is a scalar.

use nalgebra::linalg::SymmetricEigen;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::SensorError;
use crate::linalg::{self, CMatrix};
use crate::states::{DensityMatrix, EPS_EIG};
use crate::yields::StateObservable;
use crate::Result;

/// Which factor of the bipartition carries the measurement.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum MeasuredSide {
    /// The system radicals (A, B, C), the left tensor factor.
    System,
    /// The environment particles (E_A, E_B, E_C), the right tensor factor.
    Environment,
}

/// Rank-1 von Neumann measurement basis: the projector directions are the
/// columns of a unitary on the measured factor.
#[derive(Clone, Debug)]
pub struct MeasurementBasis {
    unitary: CMatrix,
}

impl MeasurementBasis {
    pub fn new(unitary: CMatrix) -> Result<Self> {
        let defect = linalg::unitarity_defect(&unitary);
        if defect > 1e-10 {
            return Err(SensorError::numerical(format!(
                "measurement basis unitarity defect {defect:.3e}"
            )));
        }
        Ok(MeasurementBasis { unitary })
    }

    pub fn unitary(&self) -> &CMatrix {
        &self.unitary
    }

    pub fn dim(&self) -> usize {
        self.unitary.nrows()
    }
}

/// Options for the discord measurement search.
#[derive(Clone, Copy, Debug)]
pub struct DiscordOpts {
    /// Number of measurement searches; the first starts from the eigenbasis
    /// of the measured reduced state, the rest from random generators.
    pub restarts: usize,
    /// Maximum coordinate-descent sweeps per restart.
    pub max_sweeps: usize,
    /// Stop once the line-search step falls below this.
    pub tol: f64,
    pub seed: u64,
}

impl Default for DiscordOpts {
    fn default() -> Self {
        DiscordOpts {
            restarts: 16,
            max_sweeps: 40,
            tol: 1e-7,
            seed: 0,
        }
    }
}

impl DiscordOpts {
    /// Cheap settings for use inside yield quadratures, where the value is
    /// only needed as an upper bound.
    pub fn light(seed: u64) -> Self {
        DiscordOpts {
            restarts: 2,
            max_sweeps: 6,
            tol: 1e-4,
            seed,
        }
    }
}

/// Correlation measures of one state, all in bits.
#[derive(Clone, Copy, Debug)]
pub struct CorrelationReport {
    pub mutual: f64,
    pub discord: f64,
    pub holevo: f64,
    pub system_entropy: f64,
    /// |χ − S(ρ_S)| + D; zero exactly when the state is objective.
    pub objective_gap: f64,
}

/// The fixed bipartition of the six-site register: system (A,B,C) against
/// environment (E_A,E_B,E_C).
const SPLIT: (usize, usize) = (8, 8);

fn check_bipartite(rho: &DensityMatrix, dx: usize, dy: usize) -> Result<()> {
    if rho.dim() != dx * dy {
        return Err(SensorError::rejected(format!(
            "state dimension {} does not match bipartition {}x{}",
            rho.dim(),
            dx,
            dy
        )));
    }
    Ok(())
}

/// Reduced state on the left factor.
fn reduce_left(m: &CMatrix, dx: usize, dy: usize) -> CMatrix {
    let mut out = CMatrix::zeros(dx, dx);
    for x in 0..dx {
        for xp in 0..dx {
            let mut acc = Complex64::ZERO;
            for y in 0..dy {
                acc += m[(x * dy + y, xp * dy + y)];
            }
            out[(x, xp)] = acc;
        }
    }
    out
}

/// Reduced state on the right factor.
fn reduce_right(m: &CMatrix, dx: usize, dy: usize) -> CMatrix {
    let mut out = CMatrix::zeros(dy, dy);
    for y in 0..dy {
        for yp in 0..dy {
            let mut acc = Complex64::ZERO;
            for x in 0..dx {
                acc += m[(x * dy + y, x * dy + yp)];
            }
            out[(y, yp)] = acc;
        }
    }
    out
}

/// Entropy in bits of a PSD matrix with the given trace (normalizes inside).
fn entropy_of(m: &CMatrix, trace: f64) -> f64 {
    let eig = SymmetricEigen::new(m.clone());
    eig.eigenvalues
        .iter()
        .map(|&v| v / trace)
        .filter(|&v| v > EPS_EIG)
        .map(|v| -v * v.log2())
        .sum::<f64>()
        .max(0.0)
}

/// Quantum mutual information I = S(ρ_X) + S(ρ_Y) − S(ρ_XY) in bits across
/// the system/environment split of the 64-dim state. Normalization of
/// decaying states is applied internally.
pub fn mutual_information(rho: &DensityMatrix) -> Result<f64> {
    mutual_information_bipartite(rho, SPLIT.0, SPLIT.1)
}

/// Mutual information across an explicit (dx, dy) bipartition.
pub fn mutual_information_bipartite(rho: &DensityMatrix, dx: usize, dy: usize) -> Result<f64> {
    check_bipartite(rho, dx, dy)?;
    let m = rho.normalized().into_matrix();
    let s_x = entropy_of(&reduce_left(&m, dx, dy), 1.0);
    let s_y = entropy_of(&reduce_right(&m, dx, dy), 1.0);
    let s_xy = entropy_of(&m, 1.0);
    let i = s_x + s_y - s_xy;
    if i < -1e-9 {
        return Err(SensorError::numerical(format!(
            "mutual information {i:.3e} below zero"
        )));
    }
    Ok(i.max(0.0))
}

/// Measurement-optimized quantum discord across the system/environment split
/// of the 64-dim state, measuring the chosen side. Returns an upper bound on
/// the discord and the best measurement found.
pub fn discord(
    rho: &DensityMatrix,
    measured: MeasuredSide,
    opts: &DiscordOpts,
) -> Result<(f64, MeasurementBasis)> {
    discord_bipartite(rho, SPLIT.0, SPLIT.1, measured, opts)
}

/// Discord across an explicit (dx, dy) bipartition.
///
/// D = S(ρ_X) − S(ρ_XY) + min over measurements {Π_X|i} of Σ p_i S(ρ_Y|i),
/// where X is the measured factor and ρ_Y|i the conditional state on the
/// other factor.
pub fn discord_bipartite(
    rho: &DensityMatrix,
    dx: usize,
    dy: usize,
    measured: MeasuredSide,
    opts: &DiscordOpts,
) -> Result<(f64, MeasurementBasis)> {
    check_bipartite(rho, dx, dy)?;
    if opts.restarts == 0 {
        return Err(SensorError::rejected(
            "discord search requires at least one restart".to_string(),
        ));
    }
    let m = rho.normalized().into_matrix();
    // Reorder so the measured factor is on the left.
    let (joint, dm, d_other) = match measured {
        MeasuredSide::System => (m, dx, dy),
        MeasuredSide::Environment => (swap_factors(&m, dx, dy), dy, dx),
    };
    let s_x = entropy_of(&reduce_left(&joint, dm, d_other), 1.0);
    let s_xy = entropy_of(&joint, 1.0);

    let warm_start = SymmetricEigen::new(reduce_left(&joint, dm, d_other)).eigenvectors;

    let candidates: Vec<(f64, CMatrix)> = (0..opts.restarts)
        .into_par_iter()
        .map(|r| {
            let init = if r == 0 {
                warm_start.clone()
            } else {
                let g = random_hermitian(dm, opts.seed.wrapping_add(r as u64));
                exp_minus_i(&g)
            };
            minimize_conditional_entropy(&joint, dm, d_other, init, opts)
        })
        .collect();

    let mut best: Option<(f64, &CMatrix)> = None;
    for (value, basis) in candidates.iter() {
        if best.is_none_or(|(v, _)| *value < v) {
            best = Some((*value, basis));
        }
    }
    let (min_cond, basis) = best.expect("at least one restart");
    let d = (s_x - s_xy + min_cond).max(0.0);
    Ok((d, MeasurementBasis::new(basis.clone())?))
}

/// Holevo information χ = I − D using the same optimized measurement.
pub fn holevo(rho: &DensityMatrix, measured: MeasuredSide, opts: &DiscordOpts) -> Result<f64> {
    let i = mutual_information(rho)?;
    let (d, _) = discord(rho, measured, opts)?;
    let chi = i - d;
    if chi < -1e-9 {
        return Err(SensorError::numerical(format!(
            "Holevo information {chi:.3e} below zero"
        )));
    }
    Ok(chi.max(0.0))
}

/// Full correlation report across the system/environment split, measuring
/// the system factor.
pub fn objectivity_report(rho: &DensityMatrix, opts: &DiscordOpts) -> Result<CorrelationReport> {
    objectivity_report_bipartite(rho, SPLIT.0, SPLIT.1, opts)
}

/// Correlation report for an explicit bipartition, measured on the left
/// factor. The objectivity gap |χ − S(ρ_X)| + D vanishes exactly when the
/// state has zero discord and classical correlations saturating the measured
/// factor's entropy.
pub fn objectivity_report_bipartite(
    rho: &DensityMatrix,
    dx: usize,
    dy: usize,
    opts: &DiscordOpts,
) -> Result<CorrelationReport> {
    let mutual = mutual_information_bipartite(rho, dx, dy)?;
    let (d, _) = discord_bipartite(rho, dx, dy, MeasuredSide::System, opts)?;
    let chi = (mutual - d).max(0.0);
    let m = rho.normalized().into_matrix();
    let s_sys = entropy_of(&reduce_left(&m, dx, dy), 1.0);
    Ok(CorrelationReport {
        mutual,
        discord: d,
        holevo: chi,
        system_entropy: s_sys,
        objective_gap: (chi - s_sys).abs() + d,
    })
}

/// Exchange the two tensor factors: ρ'_{(y x),(y' x')} = ρ_{(x y),(x' y')}.
fn swap_factors(m: &CMatrix, dx: usize, dy: usize) -> CMatrix {
    let d = dx * dy;
    let mut out = CMatrix::zeros(d, d);
    for x in 0..dx {
        for y in 0..dy {
            for xp in 0..dx {
                for yp in 0..dy {
                    out[(y * dx + x, yp * dx + xp)] = m[(x * dy + y, xp * dy + yp)];
                }
            }
        }
    }
    out
}

fn random_hermitian(dim: usize, seed: u64) -> CMatrix {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
    let g = CMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
    });
    linalg::hermitize(&g)
}

/// exp(-iG) for Hermitian G, via eigendecomposition.
fn exp_minus_i(g: &CMatrix) -> CMatrix {
    let eig = SymmetricEigen::new(g.clone());
    let d = CMatrix::from_diagonal(&eig.eigenvalues.map(|w| Complex64::from_polar(1.0, -w)));
    linalg::conjugate_by_adjoint(&eig.eigenvectors, &d)
}

/// Σ_i p_i S(ρ_Y|i) for the measurement whose directions are the columns of
/// `basis` on the left factor.
fn conditional_entropy(joint: &CMatrix, dm: usize, d_other: usize, basis: &CMatrix) -> f64 {
    // T = (U ⊗ 1)† ρ (U ⊗ 1); the conditional (unnormalized) states are the
    // diagonal blocks T[(i,·),(i,·)].
    let u_full = linalg::kron(basis, &linalg::identity(d_other));
    let t = linalg::conjugate_by(&u_full, joint);
    let mut total = 0.0;
    for i in 0..dm {
        let mut block = CMatrix::zeros(d_other, d_other);
        let mut p = 0.0;
        for y in 0..d_other {
            for yp in 0..d_other {
                block[(y, yp)] = t[(i * d_other + y, i * d_other + yp)];
            }
            p += block[(y, y)].re;
        }
        if p > 1e-14 {
            total += p * entropy_of(&block, p);
        }
    }
    total
}

/// Coordinate descent on the entries of the Hermitian generator G around the
/// initial unitary: U(G) = exp(-iG) · U_init.
fn minimize_conditional_entropy(
    joint: &CMatrix,
    dm: usize,
    d_other: usize,
    init: CMatrix,
    opts: &DiscordOpts,
) -> (f64, CMatrix) {
    // Real coordinates of a Hermitian dm x dm generator.
    let mut coords: Vec<(usize, usize, bool)> = Vec::new();
    for i in 0..dm {
        coords.push((i, i, true));
    }
    for i in 0..dm {
        for j in (i + 1)..dm {
            coords.push((i, j, true));
            coords.push((i, j, false));
        }
    }

    let mut g = CMatrix::zeros(dm, dm);
    let mut best_u = init.clone();
    let mut best = conditional_entropy(joint, dm, d_other, &best_u);
    let mut step = 0.3_f64;

    let eval = |g: &CMatrix| -> (f64, CMatrix) {
        let u = linalg::mul(&exp_minus_i(g), &init);
        (conditional_entropy(joint, dm, d_other, &u), u)
    };

    for _ in 0..opts.max_sweeps {
        let mut improved = false;
        for &(i, j, re_part) in coords.iter() {
            for sign in [1.0_f64, -1.0] {
                let mut trial = g.clone();
                let delta = if re_part {
                    Complex64::new(sign * step, 0.0)
                } else {
                    Complex64::new(0.0, sign * step)
                };
                trial[(i, j)] += delta;
                if i != j {
                    trial[(j, i)] += delta.conj();
                }
                let (value, u) = eval(&trial);
                if value < best - 1e-15 {
                    best = value;
                    best_u = u;
                    g = trial;
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            step *= 0.5;
            if step < opts.tol {
                break;
            }
        }
    }
    (best, best_u)
}

/// Mutual information I(ABC : E) in bits as a weighted-yield observable.
pub struct MutualObservable;

impl StateObservable for MutualObservable {
    fn name(&self) -> &str {
        "mutual"
    }

    fn evaluate(&self, rho: &DensityMatrix) -> Result<f64> {
        mutual_information(rho)
    }
}

/// Quantum discord D(ABC : E) in bits as a weighted-yield observable,
/// measured on the system factor.
pub struct DiscordObservable {
    pub opts: DiscordOpts,
}

impl StateObservable for DiscordObservable {
    fn name(&self) -> &str {
        "discord"
    }

    fn evaluate(&self, rho: &DensityMatrix) -> Result<f64> {
        Ok(discord(rho, MeasuredSide::System, &self.opts)?.0)
    }
}

/// Holevo information χ(ABC : E) in bits as a weighted-yield observable.
pub struct HolevoObservable {
    pub opts: DiscordOpts,
}

impl StateObservable for HolevoObservable {
    fn name(&self) -> &str {
        "holevo"
    }

    fn evaluate(&self, rho: &DensityMatrix) -> Result<f64> {
        holevo(rho, MeasuredSide::System, &self.opts)
    }
}
