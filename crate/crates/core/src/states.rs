//! Density matrices, random-state sampling, entropies and basis-independent
//! coherence measures.
//!
//! States are stored with their raw trace: recombination decay makes evolved
//! states sub-normalized (trace e^{-kt} < 1), and both the yield integrals
//! and the trace-decreasing coherence measure need the raw trace.
//! Normalization is always an explicit caller decision.

use nalgebra::linalg::SymmetricEigen;
use num_complex::Complex64;
use rand::Rng;

use crate::error::SensorError;
use crate::linalg::{self, CMatrix};
use crate::Result;

/// Eigenvalues in [-EPS_EIG_FLOOR, EPS_EIG] contribute zero entropy.
pub const EPS_EIG: f64 = 1e-12;
/// Eigenvalues below this are a numerical-consistency error.
pub const EIG_NEGATIVE_LIMIT: f64 = -1e-8;
/// Hermiticity tolerance at construction.
pub const HERMITICITY_TOL: f64 = 1e-10;

/// Dense complex Hermitian positive-semidefinite matrix with trace ≤ 1.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
    trace: f64,
}

impl DensityMatrix {
    /// Validates shape (square, power-of-two, ≤ 64), Hermiticity to 1e-10 and
    /// 0 < trace ≤ 1 + 1e-10. Positivity is clamped at use sites, not here.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let (r, c) = matrix.shape();
        if r != c || !(2..=64).contains(&r) || !r.is_power_of_two() {
            return Err(SensorError::rejected(format!(
                "density matrix must be square with power-of-two dimension in [2, 64], got {r}x{c}"
            )));
        }
        let defect = linalg::hermiticity_defect(&matrix);
        if defect > HERMITICITY_TOL {
            return Err(SensorError::numerical(format!(
                "density matrix is not Hermitian: defect {defect:.3e}"
            )));
        }
        let tr: Complex64 = (0..r).map(|i| matrix[(i, i)]).sum();
        if tr.im.abs() > HERMITICITY_TOL {
            return Err(SensorError::numerical(format!(
                "density matrix trace has imaginary part {:.3e}",
                tr.im
            )));
        }
        if !(tr.re > 0.0 && tr.re <= 1.0 + 1e-10) {
            return Err(SensorError::rejected(format!(
                "density matrix trace must lie in (0, 1], got {}",
                tr.re
            )));
        }
        Ok(DensityMatrix {
            matrix,
            trace: tr.re,
        })
    }

    /// Construction for internal hot paths that maintain the invariants
    /// themselves (propagation preserves Hermiticity and trace scaling).
    pub(crate) fn from_parts_unchecked(matrix: CMatrix, trace: f64) -> Self {
        DensityMatrix { matrix, trace }
    }

    /// Maximally mixed state 1/d.
    pub fn maximally_mixed(dim: usize) -> Self {
        let m = linalg::identity(dim).map(|z| z / dim as f64);
        DensityMatrix {
            matrix: m,
            trace: 1.0,
        }
    }

    /// Pure state |index⟩⟨index| in the computational basis.
    pub fn basis_state(dim: usize, index: usize) -> Self {
        assert!(index < dim);
        let mut m = CMatrix::zeros(dim, dim);
        m[(index, index)] = Complex64::ONE;
        DensityMatrix { matrix: m, trace: 1.0 }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Number of qubit sites in this state.
    pub fn site_count(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    pub fn trace(&self) -> f64 {
        self.trace
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    /// Trace-normalized copy.
    pub fn normalized(&self) -> DensityMatrix {
        DensityMatrix {
            matrix: self.matrix.map(|z| z / self.trace),
            trace: 1.0,
        }
    }

    /// Tensor product self ⊗ other.
    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        DensityMatrix {
            matrix: linalg::kron(&self.matrix, &other.matrix),
            trace: self.trace * other.trace,
        }
    }

    /// tr[op ρ], checked real to numerical tolerance.
    pub fn expectation(&self, op: &CMatrix) -> Result<f64> {
        let d = self.dim();
        assert_eq!(op.shape(), (d, d));
        let mut acc = Complex64::ZERO;
        for i in 0..d {
            for j in 0..d {
                acc += op[(i, j)] * self.matrix[(j, i)];
            }
        }
        if acc.im.abs() > 1e-9 {
            return Err(SensorError::numerical(format!(
                "expectation value has imaginary part {:.3e}",
                acc.im
            )));
        }
        Ok(acc.re)
    }

    /// Eigenvalues of the raw matrix, ascending, clamped at -EPS floor.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let eig = SymmetricEigen::new(self.matrix.clone());
        let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        if let Some(&lowest) = vals.first() {
            if lowest < EIG_NEGATIVE_LIMIT {
                return Err(SensorError::numerical(format!(
                    "density matrix has eigenvalue {lowest:.3e} below {EIG_NEGATIVE_LIMIT:.0e}"
                )));
            }
        }
        Ok(vals.into_iter().map(|v| v.max(0.0)).collect())
    }

    /// Smallest raw eigenvalue, without clamping.
    pub fn min_eigenvalue(&self) -> f64 {
        SymmetricEigen::new(self.matrix.clone())
            .eigenvalues
            .iter()
            .fold(f64::INFINITY, |m, &v| m.min(v))
    }
}

/// Von Neumann entropy in bits of the trace-normalized state:
/// S = -Σ λ log₂ λ over eigenvalues λ > EPS_EIG.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    entropy_of_eigenvalues(&rho.normalized().eigenvalues()?)
}

/// Von Neumann entropy in bits of the raw (possibly sub-normalized) matrix.
pub fn von_neumann_entropy_raw(rho: &DensityMatrix) -> Result<f64> {
    entropy_of_eigenvalues(&rho.eigenvalues()?)
}

fn entropy_of_eigenvalues(vals: &[f64]) -> Result<f64> {
    let s: f64 = vals
        .iter()
        .filter(|&&v| v > EPS_EIG)
        .map(|&v| -v * v.log2())
        .sum();
    Ok(s.max(0.0))
}

/// Basis-independent coherence C₁ = log₂ d − S(ρ) in bits, defined on
/// unit-trace states. Sub-normalized states must use [`coherence_c1_star`].
pub fn coherence_c1(rho: &DensityMatrix) -> Result<f64> {
    if (rho.trace() - 1.0).abs() > 1e-8 {
        return Err(SensorError::rejected(format!(
            "coherence_c1 requires unit trace (got {}); use coherence_c1_star for \
             trace-decreasing states",
            rho.trace()
        )));
    }
    let d = rho.dim() as f64;
    let s = von_neumann_entropy_raw(rho)?;
    Ok((d.log2() - s).max(0.0))
}

/// Trace-decreasing coherence
/// C₁* = (log₂ d − log₂ tr ρ)·tr ρ − S(ρ), with S on the raw matrix.
/// Reduces to C₁ when tr ρ = 1.
pub fn coherence_c1_star(rho: &DensityMatrix) -> Result<f64> {
    let tr = rho.trace();
    if tr <= 0.0 || tr.is_nan() {
        return Err(SensorError::rejected(format!(
            "coherence_c1_star requires positive trace, got {tr}"
        )));
    }
    let d = rho.dim() as f64;
    let s = von_neumann_entropy_raw(rho)?;
    Ok(((d.log2() - tr.log2()) * tr - s).max(0.0))
}

/// Bloch vector of a qubit state, |r| ≤ 1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        BlochVector { x, y, z }
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    /// True when the state is diagonal in σ_z (x = y = 0).
    pub fn is_z_diagonal(&self) -> bool {
        self.x == 0.0 && self.y == 0.0
    }
}

/// Qubit state (1 + r⃗·σ⃗)/2 from a Bloch vector.
pub fn qubit_from_bloch(r: &BlochVector) -> Result<DensityMatrix> {
    if r.norm() > 1.0 + 1e-12 {
        return Err(SensorError::rejected(format!(
            "Bloch vector norm {} exceeds 1",
            r.norm()
        )));
    }
    let half = 0.5;
    let m = CMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(half * (1.0 + r.z), 0.0),
            Complex64::new(half * r.x, -half * r.y),
            Complex64::new(half * r.x, half * r.y),
            Complex64::new(half * (1.0 - r.z), 0.0),
        ],
    );
    DensityMatrix::new(m)
}

/// Families of random initial qubit states.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum InitialFamily {
    /// Bloch vector uniform in the unit ball.
    BallUniform,
    /// Bloch vector (0, 0, z) with z uniform in [-1, 1]; σ_z-diagonal states.
    ZAxis,
}

impl InitialFamily {
    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ball" | "balluniform" => Ok(InitialFamily::BallUniform),
            "zaxis" | "z-axis" => Ok(InitialFamily::ZAxis),
            other => Err(SensorError::rejected(format!(
                "unknown state family '{other}' (expected ball or zaxis)"
            ))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            InitialFamily::BallUniform => "ball",
            InitialFamily::ZAxis => "zaxis",
        }
    }
}

/// One sampled initial state: the drawn Bloch vector, the qubit ρ₀, and the
/// composite system state ρ₀ ⊗ ρ₀ ⊗ 1/2.
#[derive(Clone, Debug)]
pub struct SampledState {
    pub bloch: BlochVector,
    pub qubit: DensityMatrix,
    pub system: DensityMatrix,
}

/// Draw a Bloch vector from the family. BallUniform uses a uniform direction
/// (Box-Muller normals) scaled by radius u^(1/3).
pub fn sample_bloch<R: Rng>(rng: &mut R, family: InitialFamily) -> BlochVector {
    match family {
        InitialFamily::ZAxis => {
            let z = rng.random_range(-1.0..=1.0);
            BlochVector::new(0.0, 0.0, z)
        }
        InitialFamily::BallUniform => {
            let normals = box_muller_triple(rng);
            let norm = (normals[0] * normals[0] + normals[1] * normals[1]
                + normals[2] * normals[2])
                .sqrt();
            let radius = rng.random::<f64>().powf(1.0 / 3.0);
            if norm < 1e-12 {
                return BlochVector::new(0.0, 0.0, 0.0);
            }
            BlochVector::new(
                radius * normals[0] / norm,
                radius * normals[1] / norm,
                radius * normals[2] / norm,
            )
        }
    }
}

/// Sample a full initial system state ρ₀ ⊗ ρ₀ ⊗ 1/2.
pub fn sample_initial_family<R: Rng>(rng: &mut R, family: InitialFamily) -> SampledState {
    let bloch = sample_bloch(rng, family);
    let qubit = qubit_from_bloch(&bloch).expect("sampled Bloch vectors are in the ball");
    let system = composite_system(&qubit);
    SampledState {
        bloch,
        qubit,
        system,
    }
}

/// Composite system state ρ₀ ⊗ ρ₀ ⊗ 1/2 on (A, B, C).
pub fn composite_system(qubit: &DensityMatrix) -> DensityMatrix {
    qubit
        .tensor(qubit)
        .tensor(&DensityMatrix::maximally_mixed(2))
}

/// Environment product state ρ₀ ⊗ ρ₀ ⊗ ρ₀ on (E_A, E_B, E_C).
pub fn composite_environment(qubit: &DensityMatrix) -> DensityMatrix {
    qubit.tensor(qubit).tensor(qubit)
}

fn box_muller_triple<R: Rng>(rng: &mut R) -> [f64; 3] {
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random();
    let u3: f64 = 1.0 - rng.random::<f64>();
    let u4: f64 = rng.random();
    let r1 = (-2.0 * u1.ln()).sqrt();
    let r2 = (-2.0 * u3.ln()).sqrt();
    [
        r1 * (std::f64::consts::TAU * u2).cos(),
        r1 * (std::f64::consts::TAU * u2).sin(),
        r2 * (std::f64::consts::TAU * u4).cos(),
    ]
}

/// Partial trace keeping the given qubit sites (strictly increasing indices
/// into this state's own site list; site 0 is the leftmost tensor factor).
/// Trace and positivity are preserved.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let n = rho.site_count();
    if keep.is_empty() {
        return Err(SensorError::rejected(
            "partial_trace requires a non-empty keep set".to_string(),
        ));
    }
    if keep.windows(2).any(|w| w[0] >= w[1]) || keep.iter().any(|&s| s >= n) {
        return Err(SensorError::rejected(format!(
            "keep sites must be strictly increasing and < {n}"
        )));
    }
    let traced: Vec<usize> = (0..n).filter(|s| !keep.contains(s)).collect();
    if traced.is_empty() {
        return Ok(rho.clone());
    }
    let kd = 1usize << keep.len();
    let td = 1usize << traced.len();
    let mut out = CMatrix::zeros(kd, kd);
    // Site s occupies bit (n-1-s) counting from the least significant bit.
    let assemble = |kept_idx: usize, traced_idx: usize| -> usize {
        let mut full = 0usize;
        for (pos, &s) in keep.iter().enumerate() {
            let bit = (kept_idx >> (keep.len() - 1 - pos)) & 1;
            full |= bit << (n - 1 - s);
        }
        for (pos, &s) in traced.iter().enumerate() {
            let bit = (traced_idx >> (traced.len() - 1 - pos)) & 1;
            full |= bit << (n - 1 - s);
        }
        full
    };
    for i in 0..kd {
        for j in 0..kd {
            let mut acc = Complex64::ZERO;
            for t in 0..td {
                acc += rho.matrix[(assemble(i, t), assemble(j, t))];
            }
            out[(i, j)] = acc;
        }
    }
    Ok(DensityMatrix::from_parts_unchecked(out, rho.trace))
}
