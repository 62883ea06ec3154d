//! Shared oracle helpers for the integration tests. These stay independent
//! of the library's propagation path: the matrix exponential here is Taylor
//! series with scaling and squaring, not an eigendecomposition.
#![allow(dead_code)] // each test target uses a different subset

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use triradical::linalg::{self, CMatrix};
use triradical::states::DensityMatrix;

/// exp(M) by scaling-and-squaring with a Taylor series.
pub fn expm_taylor(m: &CMatrix) -> CMatrix {
    let norm = linalg::fro_norm(m);
    let squarings = norm.log2().ceil().max(0.0) as u32 + 4;
    let scaled = m.map(|z| z / 2f64.powi(squarings as i32));
    let dim = m.nrows();
    let mut term = linalg::identity(dim);
    let mut acc = linalg::identity(dim);
    for k in 1..30 {
        term = linalg::mul(&term, &scaled).map(|z| z / k as f64);
        acc += &term;
        if linalg::fro_norm(&term) < 1e-18 {
            break;
        }
    }
    for _ in 0..squarings {
        acc = linalg::mul(&acc, &acc);
    }
    acc
}

/// exp(-iHτ) for Hermitian H.
pub fn evolution_unitary(h: &CMatrix, tau: f64) -> CMatrix {
    expm_taylor(&h.map(|z| z * Complex64::new(0.0, -tau)))
}

pub fn random_density(dim: usize, seed: u64) -> DensityMatrix {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let g = CMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
    });
    let m = linalg::mul(&g, &g.adjoint());
    let tr: f64 = (0..dim).map(|i| m[(i, i)].re).sum();
    DensityMatrix::new(m.map(|z| z / tr)).unwrap()
}

pub fn random_hermitian(dim: usize, seed: u64) -> CMatrix {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let g = CMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
    });
    linalg::hermitize(&g)
}
