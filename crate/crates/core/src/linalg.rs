//! Dense complex linear-algebra helpers shared by the simulation modules.
//!
//! Matrices are `nalgebra` dynamic matrices over `Complex<f64>` in
//! column-major storage. The hot multiply is routed through
//! `matrixmultiply::zgemm` so eigenbasis transforms of the 64-dimensional
//! joint state do not fall back to the generic triple loop.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;

/// out = a * b, dimensions checked by the caller's types at runtime.
pub fn mul_into(out: &mut CMatrix, a: &CMatrix, b: &CMatrix) {
    let (m, k) = a.shape();
    let (k2, n) = b.shape();
    assert_eq!(k, k2, "inner dimensions must agree");
    assert_eq!(out.shape(), (m, n), "output shape must agree");
    // Complex64 is repr(C) { re: f64, im: f64 }, layout-compatible with [f64; 2].
    unsafe {
        matrixmultiply::zgemm(
            matrixmultiply::CGemmOption::Standard,
            matrixmultiply::CGemmOption::Standard,
            m,
            k,
            n,
            [1.0, 0.0],
            a.as_slice().as_ptr() as *const [f64; 2],
            1,
            m as isize,
            b.as_slice().as_ptr() as *const [f64; 2],
            1,
            k as isize,
            [0.0, 0.0],
            out.as_mut_slice().as_mut_ptr() as *mut [f64; 2],
            1,
            m as isize,
        );
    }
}

/// a * b as a fresh matrix.
pub fn mul(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let mut out = CMatrix::zeros(a.nrows(), b.ncols());
    mul_into(&mut out, a, b);
    out
}

/// u† * m * u (transform into the basis whose columns are `u`).
pub fn conjugate_by(u: &CMatrix, m: &CMatrix) -> CMatrix {
    let um = mul(&u.adjoint(), m);
    mul(&um, u)
}

/// u * m * u† (transform out of the basis whose columns are `u`).
pub fn conjugate_by_adjoint(u: &CMatrix, m: &CMatrix) -> CMatrix {
    let um = mul(u, m);
    mul(&um, &u.adjoint())
}

/// Kronecker product a ⊗ b.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ra, ca) = a.shape();
    let (rb, cb) = b.shape();
    let mut out = CMatrix::zeros(ra * rb, ca * cb);
    for ja in 0..ca {
        for ia in 0..ra {
            let s = a[(ia, ja)];
            if s == Complex64::ZERO {
                continue;
            }
            for jb in 0..cb {
                for ib in 0..rb {
                    out[(ia * rb + ib, ja * cb + jb)] = s * b[(ib, jb)];
                }
            }
        }
    }
    out
}

/// Kronecker product of a list of factors, left factor most significant.
pub fn kron_list(factors: &[&CMatrix]) -> CMatrix {
    assert!(!factors.is_empty());
    let mut out = factors[0].clone();
    for f in &factors[1..] {
        out = kron(&out, f);
    }
    out
}

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

/// (m + m†)/2.
pub fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Frobenius norm.
pub fn fro_norm(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest |m_ij - n_ij|.
pub fn max_abs_diff(m: &CMatrix, n: &CMatrix) -> f64 {
    m.iter()
        .zip(n.iter())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max)
}

/// Largest deviation from `n` after aligning a global phase, using the
/// largest entry of `m` as the phase reference.
pub fn max_abs_diff_up_to_phase(m: &CMatrix, n: &CMatrix) -> f64 {
    let (mut best, mut idx) = (0.0_f64, 0usize);
    for (i, z) in m.iter().enumerate() {
        if z.norm() > best {
            best = z.norm();
            idx = i;
        }
    }
    if best == 0.0 {
        return max_abs_diff(m, n);
    }
    let a = m.as_slice()[idx];
    let b = n.as_slice()[idx];
    if b.norm() == 0.0 {
        return max_abs_diff(m, n);
    }
    let phase = b / a / (b / a).norm();
    let m_aligned = m.map(|z| z * phase);
    max_abs_diff(&m_aligned, n)
}

/// How far m is from Hermitian, as max |m_ij - conj(m_ji)|.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    let mut worst = 0.0_f64;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let d = (m[(i, j)] - m[(j, i)].conj()).norm();
            worst = worst.max(d);
        }
    }
    worst
}

/// How far u is from unitary, as the Frobenius norm of u†u - 1.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    let gram = mul(&u.adjoint(), u);
    fro_norm(&(gram - identity(u.ncols())))
}
