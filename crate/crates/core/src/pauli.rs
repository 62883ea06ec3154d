//! Exact algebra of weighted Pauli strings on the six sensor sites.
//!
//! Site ordering is fixed as `(A, B, C, E_A, E_B, E_C)`; every module in the
//! crate shares this convention, with site 0 as the leftmost (most
//! significant) tensor factor. Operators shorter than six sites are embedded
//! by padding with the identity.
//!
//! A [`PauliSum`] keeps its phase folded into complex coefficients so that
//! the label tuple is a unique map key; merging prunes coefficients below
//! [`EPS_PRUNE`].

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::error::SensorError;
use crate::linalg::{self, CMatrix};
use crate::Result;

/// Number of qubit sites: system radicals A, B, C and environments E_A, E_B, E_C.
pub const SITE_COUNT: usize = 6;
/// Hilbert-space dimension of the full site register.
pub const DIM: usize = 1 << SITE_COUNT;

/// Coefficients with magnitude below this are dropped when merging terms.
pub const EPS_PRUNE: f64 = 1e-14;

/// Single-site Pauli label.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_symbol(c: char) -> Result<Pauli> {
        match c {
            'I' => Ok(Pauli::I),
            'X' => Ok(Pauli::X),
            'Y' => Ok(Pauli::Y),
            'Z' => Ok(Pauli::Z),
            other => Err(SensorError::rejected(format!(
                "unknown Pauli symbol '{other}'"
            ))),
        }
    }

    /// 2x2 matrix of this Pauli.
    pub fn matrix(self) -> CMatrix {
        let o = Complex64::ZERO;
        let one = Complex64::ONE;
        let i = Complex64::I;
        match self {
            Pauli::I => CMatrix::from_row_slice(2, 2, &[one, o, o, one]),
            Pauli::X => CMatrix::from_row_slice(2, 2, &[o, one, one, o]),
            Pauli::Y => CMatrix::from_row_slice(2, 2, &[o, -i, i, o]),
            Pauli::Z => CMatrix::from_row_slice(2, 2, &[one, o, o, -one]),
        }
    }
}

/// Single-qubit product a·b = phase · c.
fn single_product(a: Pauli, b: Pauli) -> (Pauli, Complex64) {
    use Pauli::*;
    let one = Complex64::ONE;
    let i = Complex64::I;
    match (a, b) {
        (I, p) => (p, one),
        (p, I) => (p, one),
        (X, X) | (Y, Y) | (Z, Z) => (I, one),
        (X, Y) => (Z, i),
        (Y, X) => (Z, -i),
        (Y, Z) => (X, i),
        (Z, Y) => (X, -i),
        (Z, X) => (Y, i),
        (X, Z) => (Y, -i),
    }
}

/// Ordered labels of one string on the six sites.
pub type Labels = [Pauli; SITE_COUNT];

/// All-identity label tuple.
pub const IDENTITY_LABELS: Labels = [Pauli::I; SITE_COUNT];

/// One weighted Pauli string on the six sites.
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct PauliString {
    pub labels: Labels,
    pub coefficient: Complex64,
}

impl PauliString {
    pub fn new(labels: Labels, coefficient: Complex64) -> Self {
        PauliString {
            labels,
            coefficient,
        }
    }

    /// The identity string with unit coefficient.
    pub fn identity() -> Self {
        PauliString::new(IDENTITY_LABELS, Complex64::ONE)
    }

    /// A single-site operator embedded on the six sites.
    pub fn single(site: usize, p: Pauli, coefficient: Complex64) -> Self {
        assert!(site < SITE_COUNT, "site index out of range");
        let mut labels = IDENTITY_LABELS;
        labels[site] = p;
        PauliString::new(labels, coefficient)
    }

    /// Matrix product of two strings; the accumulated phase lands in the
    /// coefficient, so |result| = |a|·|b|.
    pub fn multiply(a: &PauliString, b: &PauliString) -> PauliString {
        let mut labels = IDENTITY_LABELS;
        let mut coeff = a.coefficient * b.coefficient;
        for (out, (&pa, &pb)) in labels
            .iter_mut()
            .zip(a.labels.iter().zip(b.labels.iter()))
        {
            let (p, phase) = single_product(pa, pb);
            *out = p;
            coeff *= phase;
        }
        PauliString::new(labels, coeff)
    }
}

/// Matrix product of two Pauli strings.
pub fn multiply(a: &PauliString, b: &PauliString) -> PauliString {
    PauliString::multiply(a, b)
}

/// Sum of weighted Pauli strings, keyed by label tuple.
#[derive(Clone, PartialEq, Default)]
pub struct PauliSum {
    terms: BTreeMap<Labels, Complex64>,
}

impl PauliSum {
    pub fn zero() -> Self {
        PauliSum::default()
    }

    pub fn identity() -> Self {
        PauliSum::from(PauliString::identity())
    }

    pub fn from_terms<I: IntoIterator<Item = PauliString>>(terms: I) -> Self {
        let mut sum = PauliSum::zero();
        for t in terms {
            sum.add_term(t);
        }
        sum
    }

    pub fn add_term(&mut self, term: PauliString) {
        let entry = self.terms.entry(term.labels).or_insert(Complex64::ZERO);
        *entry += term.coefficient;
        if entry.norm() < EPS_PRUNE {
            self.terms.remove(&term.labels);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Labels, &Complex64)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, labels: &Labels) -> Complex64 {
        self.terms.get(labels).copied().unwrap_or(Complex64::ZERO)
    }

    pub fn scale(&self, factor: Complex64) -> PauliSum {
        PauliSum::from_terms(
            self.terms
                .iter()
                .map(|(l, c)| PauliString::new(*l, c * factor)),
        )
    }

    pub fn add(&self, other: &PauliSum) -> PauliSum {
        let mut out = self.clone();
        for (l, c) in other.terms.iter() {
            out.add_term(PauliString::new(*l, *c));
        }
        out
    }

    pub fn sub(&self, other: &PauliSum) -> PauliSum {
        self.add(&other.scale(-Complex64::ONE))
    }

    /// Matrix product of two sums, expanded term by term and merged.
    pub fn multiply(&self, other: &PauliSum) -> PauliSum {
        let mut out = PauliSum::zero();
        for (la, ca) in self.terms.iter() {
            for (lb, cb) in other.terms.iter() {
                out.add_term(PauliString::multiply(
                    &PauliString::new(*la, *ca),
                    &PauliString::new(*lb, *cb),
                ));
            }
        }
        out
    }

    /// ab - ba with merged like terms.
    pub fn commutator(a: &PauliSum, b: &PauliSum) -> PauliSum {
        a.multiply(b).sub(&b.multiply(a))
    }

    /// Hermitian conjugate: conjugate every coefficient (labels are Hermitian).
    pub fn dagger(&self) -> PauliSum {
        PauliSum::from_terms(
            self.terms
                .iter()
                .map(|(l, c)| PauliString::new(*l, c.conj())),
        )
    }

    /// True when every coefficient is real to `tol`, i.e. the operator is
    /// Hermitian after canonical phase normalization.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.terms.values().all(|c| c.im.abs() <= tol)
    }

    /// Trace on the full register: only the identity string contributes.
    pub fn trace(&self) -> Complex64 {
        self.coefficient(&IDENTITY_LABELS) * (DIM as f64)
    }

    /// Frobenius norm; Pauli strings are orthogonal with tr[P†P] = DIM.
    pub fn fro_norm(&self) -> f64 {
        let sq: f64 = self.terms.values().map(|c| c.norm_sqr()).sum();
        (sq * DIM as f64).sqrt()
    }

    /// Kronecker-product expansion to a dense DIM x DIM matrix.
    pub fn to_dense(&self) -> CMatrix {
        let mut out = CMatrix::zeros(DIM, DIM);
        for (labels, coeff) in self.terms.iter() {
            accumulate_string(&mut out, labels, *coeff);
        }
        out
    }

    /// Hilbert-Schmidt expansion of a dense DIM x DIM matrix, with
    /// coefficients tr[P†m]/DIM.
    pub fn from_dense(m: &CMatrix) -> Result<PauliSum> {
        if m.shape() != (DIM, DIM) {
            return Err(SensorError::rejected(format!(
                "from_dense expects a {DIM}x{DIM} matrix, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let mut out = PauliSum::zero();
        let mut labels = IDENTITY_LABELS;
        expand_dense(m, 0, &mut labels, &mut out);
        Ok(out)
    }

    /// Hilbert-Schmidt expansion of an operator on a subset of sites,
    /// embedded on the six-site register with identity elsewhere. `m` must be
    /// 2^sites.len() dimensional and `sites` strictly increasing.
    pub fn from_dense_on_sites(m: &CMatrix, sites: &[usize]) -> Result<PauliSum> {
        let dim = 1usize << sites.len();
        if m.shape() != (dim, dim) {
            return Err(SensorError::rejected(format!(
                "from_dense_on_sites expects a {dim}x{dim} matrix for {} sites",
                sites.len()
            )));
        }
        if sites.windows(2).any(|w| w[0] >= w[1]) || sites.iter().any(|&s| s >= SITE_COUNT) {
            return Err(SensorError::rejected(
                "sites must be strictly increasing and < 6".to_string(),
            ));
        }
        let n = sites.len();
        let mut out = PauliSum::zero();
        for code in 0..(4usize.pow(n as u32)) {
            let mut local = vec![Pauli::I; n];
            let mut c = code;
            for site in local.iter_mut().rev() {
                *site = Pauli::ALL[c % 4];
                c /= 4;
            }
            let coeff = hs_coefficient_local(m, &local) / dim as f64;
            if coeff.norm() >= EPS_PRUNE {
                let mut labels = IDENTITY_LABELS;
                for (pos, &site) in sites.iter().enumerate() {
                    labels[site] = local[pos];
                }
                out.add_term(PauliString::new(labels, coeff));
            }
        }
        Ok(out)
    }

    /// Debug serialization: one line `<re> <im> <labels>` per term in key order.
    pub fn to_debug_lines(&self) -> String {
        let mut s = String::new();
        for (labels, coeff) in self.terms.iter() {
            let label_str: String = labels.iter().map(|p| p.symbol()).collect();
            s.push_str(&format!("{:?} {:?} {}\n", coeff.re, coeff.im, label_str));
        }
        s
    }
}

impl From<PauliString> for PauliSum {
    fn from(term: PauliString) -> Self {
        PauliSum::from_terms([term])
    }
}

impl fmt::Debug for PauliSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_debug_lines())
    }
}

/// ab - ba on six sites.
pub fn commutator(a: &PauliSum, b: &PauliSum) -> PauliSum {
    PauliSum::commutator(a, b)
}

/// Unnormalized tr[P† m] for a tensor of single-site Paulis; each string has
/// exactly one nonzero per column, so the trace is a single sweep.
fn hs_coefficient_local(m: &CMatrix, labels: &[Pauli]) -> Complex64 {
    let n = labels.len();
    let mats: Vec<CMatrix> = labels.iter().map(|p| p.matrix()).collect();
    let dim = 1usize << n;
    let mut acc = Complex64::ZERO;
    for col in 0..dim {
        let mut row = 0usize;
        let mut entry = Complex64::ONE;
        for (pos, pm) in mats.iter().enumerate() {
            let bit = (col >> (n - 1 - pos)) & 1;
            let (r, v) = if pm[(0, bit)] != Complex64::ZERO {
                (0usize, pm[(0, bit)])
            } else {
                (1usize, pm[(1, bit)])
            };
            row = (row << 1) | r;
            entry *= v;
        }
        acc += entry.conj() * m[(row, col)];
    }
    acc
}

/// Add coeff · P(labels) into a dense matrix without building intermediates.
fn accumulate_string(out: &mut CMatrix, labels: &Labels, coeff: Complex64) {
    let mats: Vec<CMatrix> = labels.iter().map(|p| p.matrix()).collect();
    for col in 0..DIM {
        let mut row = 0usize;
        let mut entry = coeff;
        for (pos, pm) in mats.iter().enumerate() {
            let bit = (col >> (SITE_COUNT - 1 - pos)) & 1;
            let (r, v) = if pm[(0, bit)] != Complex64::ZERO {
                (0usize, pm[(0, bit)])
            } else {
                (1usize, pm[(1, bit)])
            };
            row = (row << 1) | r;
            entry *= v;
        }
        out[(row, col)] += entry;
    }
}

/// Recursive Hilbert-Schmidt projection over all six-site labels.
fn expand_dense(m: &CMatrix, site: usize, labels: &mut Labels, out: &mut PauliSum) {
    if site == SITE_COUNT {
        let coeff = hs_coefficient_local(m, labels) / DIM as f64;
        if coeff.norm() >= EPS_PRUNE {
            out.add_term(PauliString::new(*labels, coeff));
        }
        return;
    }
    for p in Pauli::ALL {
        labels[site] = p;
        expand_dense(m, site + 1, labels, out);
    }
    labels[site] = Pauli::I;
}

/// Dense matrix of a sum restricted to its first `n` sites (low-dimensional
/// oracle helper; panics if the operator has support beyond them).
pub fn dense_on_first_sites(sum: &PauliSum, n: usize) -> CMatrix {
    let dim = 1usize << n;
    let mut out = CMatrix::zeros(dim, dim);
    for (labels, coeff) in sum.terms() {
        assert!(
            labels[n..].iter().all(|&p| p == Pauli::I),
            "operator has support outside the first {n} sites"
        );
        let factors: Vec<CMatrix> = labels[..n].iter().map(|p| p.matrix()).collect();
        let refs: Vec<&CMatrix> = factors.iter().collect();
        out += linalg::kron_list(&refs).map(|z| z * coeff);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_string(rng: &mut ChaCha12Rng) -> PauliString {
        let mut labels = IDENTITY_LABELS;
        for l in labels.iter_mut() {
            *l = Pauli::ALL[rng.random_range(0..4)];
        }
        PauliString::new(
            labels,
            c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5),
        )
    }

    fn random_sum(rng: &mut ChaCha12Rng, terms: usize) -> PauliSum {
        PauliSum::from_terms((0..terms).map(|_| random_string(rng)))
    }

    #[test]
    fn x_times_z_is_minus_i_y() {
        let x = PauliString::single(0, Pauli::X, Complex64::ONE);
        let z = PauliString::single(0, Pauli::Z, Complex64::ONE);
        let prod = multiply(&x, &z);
        assert_eq!(prod.labels[0], Pauli::Y);
        assert!((prod.coefficient - c(0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn z_squared_is_identity() {
        let z = PauliString::single(0, Pauli::Z, Complex64::ONE);
        let prod = multiply(&z, &z);
        assert_eq!(prod.labels, IDENTITY_LABELS);
        assert!((prod.coefficient - Complex64::ONE).norm() < 1e-15);
    }

    #[test]
    fn two_site_product_matches_dense() {
        // (X⊗X)·(Z⊗1) = (XZ)⊗X = -i(Y⊗X), checked against the 4x4 product.
        let mut xx = IDENTITY_LABELS;
        xx[0] = Pauli::X;
        xx[1] = Pauli::X;
        let mut z1 = IDENTITY_LABELS;
        z1[0] = Pauli::Z;
        let a = PauliString::new(xx, Complex64::ONE);
        let b = PauliString::new(z1, Complex64::ONE);
        let prod = multiply(&a, &b);

        let dense_a = dense_on_first_sites(&PauliSum::from(a), 2);
        let dense_b = dense_on_first_sites(&PauliSum::from(b), 2);
        let dense_prod = dense_on_first_sites(&PauliSum::from(prod), 2);
        assert!(max_abs_diff(&(dense_a * dense_b), &dense_prod) < 1e-14);
        assert_eq!(prod.labels[0], Pauli::Y);
        assert_eq!(prod.labels[1], Pauli::X);
        assert!((prod.coefficient - c(0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn su2_commutator() {
        let z = PauliSum::from(PauliString::single(0, Pauli::Z, Complex64::ONE));
        let x = PauliSum::from(PauliString::single(0, Pauli::X, Complex64::ONE));
        let comm = commutator(&z, &x);
        assert_eq!(comm.len(), 1);
        let y = PauliString::single(0, Pauli::Y, Complex64::ONE);
        assert!((comm.coefficient(&y.labels) - c(0.0, 2.0)).norm() < 1e-15);
    }

    #[test]
    fn commutator_cross_checked_dense() {
        // [Z⊗1, X⊗X] = 2i(Y⊗X) on the first two sites.
        let z1 = PauliSum::from(PauliString::single(0, Pauli::Z, Complex64::ONE));
        let mut xx_labels = IDENTITY_LABELS;
        xx_labels[0] = Pauli::X;
        xx_labels[1] = Pauli::X;
        let xx = PauliSum::from(PauliString::new(xx_labels, Complex64::ONE));
        let comm = commutator(&z1, &xx);

        let dense = dense_on_first_sites(&comm, 2);
        let da = dense_on_first_sites(&z1, 2);
        let db = dense_on_first_sites(&xx, 2);
        assert!(max_abs_diff(&dense, &(&da * &db - &db * &da)) < 1e-14);

        let mut yx = IDENTITY_LABELS;
        yx[0] = Pauli::Y;
        yx[1] = Pauli::X;
        assert!((comm.coefficient(&yx) - c(0.0, 2.0)).norm() < 1e-15);
    }

    #[test]
    fn identity_commutes_with_everything() {
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        let id = PauliSum::identity().scale(c(1.0 / 8.0, 0.0));
        for _ in 0..5 {
            let h = random_sum(&mut rng, 6);
            let h = h.add(&h.dagger()).scale(c(0.5, 0.0));
            assert!(commutator(&id, &h).is_empty());
        }
    }

    #[test]
    fn hermitian_commutator_is_anti_hermitian() {
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let a = random_sum(&mut rng, 5);
        let a = a.add(&a.dagger()).scale(c(0.5, 0.0));
        let b = random_sum(&mut rng, 5);
        let b = b.add(&b.dagger()).scale(c(0.5, 0.0));
        let comm = commutator(&a, &b);
        let neg_dag = comm.dagger().scale(-Complex64::ONE);
        for (l, cf) in comm.terms() {
            assert!((cf - neg_dag.coefficient(l)).norm() < 1e-12);
        }
    }

    #[test]
    fn dense_identity() {
        let id = PauliSum::identity();
        assert!(max_abs_diff(&id.to_dense(), &linalg::identity(DIM)) < 1e-15);
    }

    #[test]
    fn dense_sigma_z_site0_is_diagonal_blocks() {
        let z = PauliSum::from(PauliString::single(0, Pauli::Z, Complex64::ONE));
        let d = z.to_dense();
        for i in 0..DIM {
            let expect = if i < DIM / 2 { 1.0 } else { -1.0 };
            assert!((d[(i, i)] - c(expect, 0.0)).norm() < 1e-15);
        }
        assert!((linalg::fro_norm(&d) - (DIM as f64).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn dense_matches_kron_construction() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let sum = random_sum(&mut rng, 5);
        let dense = sum.to_dense();
        let mut expect = CMatrix::zeros(DIM, DIM);
        for (labels, coeff) in sum.terms() {
            let f: Vec<CMatrix> = labels.iter().map(|p| p.matrix()).collect();
            let refs: Vec<&CMatrix> = f.iter().collect();
            expect += linalg::kron_list(&refs).map(|z| z * coeff);
        }
        assert!(max_abs_diff(&dense, &expect) < 1e-12);
    }

    #[test]
    fn from_dense_round_trip() {
        let mut rng = ChaCha12Rng::seed_from_u64(17);
        let sum = random_sum(&mut rng, 8);
        let herm = sum.add(&sum.dagger()).scale(c(0.5, 0.0));
        let dense = herm.to_dense();
        let back = PauliSum::from_dense(&dense).unwrap();
        assert!(max_abs_diff(&back.to_dense(), &dense) < 1e-10);
        assert!(back.is_hermitian(1e-12));
    }

    #[test]
    fn from_dense_simple_cases() {
        let id64 = linalg::identity(DIM).map(|z| z / DIM as f64);
        let sum = PauliSum::from_dense(&id64).unwrap();
        assert_eq!(sum.len(), 1);
        assert!((sum.coefficient(&IDENTITY_LABELS) - c(1.0 / DIM as f64, 0.0)).norm() < 1e-15);

        let x0 = PauliSum::from(PauliString::single(0, Pauli::X, Complex64::ONE));
        let back = PauliSum::from_dense(&x0.to_dense()).unwrap();
        assert_eq!(back.len(), 1);
        let mut labels = IDENTITY_LABELS;
        labels[0] = Pauli::X;
        assert!((back.coefficient(&labels) - Complex64::ONE).norm() < 1e-12);
    }

    #[test]
    fn from_dense_rejects_bad_shape() {
        let m = CMatrix::zeros(8, 8);
        assert!(PauliSum::from_dense(&m).is_err());
    }

    #[test]
    fn from_dense_on_sites_embeds() {
        let x = Pauli::X.matrix();
        let sum = PauliSum::from_dense_on_sites(&x, &[4]).unwrap();
        assert_eq!(sum.len(), 1);
        let mut labels = IDENTITY_LABELS;
        labels[4] = Pauli::X;
        assert!((sum.coefficient(&labels) - Complex64::ONE).norm() < 1e-12);
    }

    #[test]
    fn debug_lines_format() {
        let mut labels = IDENTITY_LABELS;
        labels[0] = Pauli::Z;
        labels[3] = Pauli::X;
        let sum = PauliSum::from(PauliString::new(labels, c(0.5, 0.0)));
        assert_eq!(sum.to_debug_lines(), "0.5 0.0 ZIIXII\n");
    }

    #[test]
    fn trace_and_norm() {
        let sum = PauliSum::identity().scale(c(0.25, 0.0));
        assert!((sum.trace() - c(16.0, 0.0)).norm() < 1e-12);
        assert!((sum.fro_norm() - 0.25 * (DIM as f64).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn pruning_drops_cancelled_terms() {
        let z = PauliString::single(2, Pauli::Z, Complex64::ONE);
        let mut sum = PauliSum::from(z);
        sum.add_term(PauliString::single(2, Pauli::Z, -Complex64::ONE));
        assert!(sum.is_empty());
    }
}
