//! Cross-module oracle tests: the analytic propagation against a 4th-order
//! ODE integration, segment evolution against an independent Taylor matrix
//! exponential, and the CNOT/SWAP interaction calibrations.

mod common;

use common::{evolution_unitary, random_density, random_hermitian};
use num_complex::Complex64;
use triradical::dynamics::{evolve_segment, ode_reference, Propagator};
use triradical::linalg::{self, CMatrix};
use triradical::model::{self, FieldAngles, SensorParams};
use triradical::pauli::Pauli;
use triradical::states::DensityMatrix;

#[test]
fn propagator_matches_ode_reference_on_random_instances() {
    let k = SensorParams::default().k;
    for seed in 0..5 {
        let h = random_hermitian(64, 1000 + seed);
        let rho = random_density(64, 2000 + seed);
        let prop = Propagator::from_dense(&h).unwrap();
        let fast = evolve_segment(&rho, &prop, 1.0, k);
        let slow = ode_reference(&rho, &h, k, 1.0, 1e-3).unwrap();
        let diff = linalg::fro_norm(&(fast.matrix() - slow.matrix()));
        assert!(diff < 1e-8, "seed {seed}: propagator vs RK4 diff {diff:.3e}");
    }
}

#[test]
fn propagator_matches_ode_for_zeeman_generator() {
    let params = SensorParams::default();
    let h = model::h_zeeman(&params, &FieldAngles::new(0.0, 0.0)).to_dense();
    let rho = random_density(64, 7);
    let prop = Propagator::from_dense(&h).unwrap();
    let fast = evolve_segment(&rho, &prop, 1.0, 0.0);
    let slow = ode_reference(&rho, &h, 0.0, 1.0, 1e-3).unwrap();
    assert!(linalg::fro_norm(&(fast.matrix() - slow.matrix())) < 1e-8);
}

#[test]
fn segment_evolution_matches_taylor_exponential() {
    // One interaction segment on |000000> with exchange and field switched
    // off, compared against U ρ U† e^{-kτ} with U from the Taylor series.
    let params = SensorParams {
        j_abc: 0.0,
        gamma_b0: 0.0,
        ..SensorParams::default()
    };
    let h = model::v_interaction(&params).to_dense();
    let rho = DensityMatrix::basis_state(64, 0);
    let prop = Propagator::from_dense(&h).unwrap();
    let fast = evolve_segment(&rho, &prop, params.tau_se, params.k);

    let u = evolution_unitary(&h, params.tau_se);
    let expect = linalg::conjugate_by_adjoint(&u, rho.matrix())
        .map(|z| z * (-params.k * params.tau_se).exp());
    let diff = linalg::max_abs_diff(fast.matrix(), &expect);
    assert!(diff < 1e-11, "expm oracle diff {diff:.3e}");
}

fn single_pair_interaction(kind: model::InteractionKind, j_se: f64) -> CMatrix {
    // One radical with its own environment qubit, 4x4.
    let sx = Pauli::X.matrix();
    let sz = Pauli::Z.matrix();
    let id = linalg::identity(2);
    match kind {
        model::InteractionKind::Cnot => {
            let a = &id - &sz;
            let b = &id - &sx;
            linalg::kron(&a, &b).map(|z| z * (j_se / 2.0))
        }
        model::InteractionKind::Swap => {
            let mut v = CMatrix::zeros(4, 4);
            for p in [Pauli::X, Pauli::Y, Pauli::Z] {
                v += linalg::kron(&p.matrix(), &p.matrix());
            }
            v.map(|z| z * j_se)
        }
    }
}

#[test]
fn cnot_calibration_at_half_pi() {
    // J_se·τ_se = π/2 turns one collision into a CNOT up to global phase.
    let tau = 1.0;
    let v = single_pair_interaction(model::InteractionKind::Cnot, std::f64::consts::FRAC_PI_2);
    let u = evolution_unitary(&v, tau);
    let mut cnot = CMatrix::zeros(4, 4);
    cnot[(0, 0)] = Complex64::ONE;
    cnot[(1, 1)] = Complex64::ONE;
    cnot[(2, 3)] = Complex64::ONE;
    cnot[(3, 2)] = Complex64::ONE;
    let dev = linalg::max_abs_diff_up_to_phase(&u, &cnot);
    assert!(dev < 1e-10, "CNOT deviation {dev:.3e}");
}

#[test]
fn swap_calibration_at_quarter_pi() {
    let tau = 1.0;
    let v = single_pair_interaction(model::InteractionKind::Swap, std::f64::consts::FRAC_PI_4);
    let u = evolution_unitary(&v, tau);
    let mut swap = CMatrix::zeros(4, 4);
    swap[(0, 0)] = Complex64::ONE;
    swap[(1, 2)] = Complex64::ONE;
    swap[(2, 1)] = Complex64::ONE;
    swap[(3, 3)] = Complex64::ONE;
    let dev = linalg::max_abs_diff_up_to_phase(&u, &swap);
    assert!(dev < 1e-10, "SWAP deviation {dev:.3e}");
}

#[test]
fn off_calibration_is_not_the_gate() {
    let v = single_pair_interaction(model::InteractionKind::Cnot, 0.7);
    let u = evolution_unitary(&v, 1.0);
    let mut cnot = CMatrix::zeros(4, 4);
    cnot[(0, 0)] = Complex64::ONE;
    cnot[(1, 1)] = Complex64::ONE;
    cnot[(2, 3)] = Complex64::ONE;
    cnot[(3, 2)] = Complex64::ONE;
    assert!(linalg::max_abs_diff_up_to_phase(&u, &cnot) > 1e-2);
}

#[test]
fn full_interaction_restricts_to_pair_blocks() {
    // The six-site CNOT interaction restricted to (A, E_A) with the other
    // sites in any fixed basis state reproduces the single-pair operator.
    let params = SensorParams::default();
    let v_full = model::v_interaction(&params).to_dense();
    let v_pair = single_pair_interaction(model::InteractionKind::Cnot, params.j_se());
    // Select basis indices where B, C, E_B, E_C are |0>.
    // Site order (A,B,C,E_A,E_B,E_C); A is bit 5, E_A is bit 2.
    let indices: Vec<usize> = (0..4)
        .map(|p| {
            let a = (p >> 1) & 1;
            let ea = p & 1;
            (a << 5) | (ea << 2)
        })
        .collect();
    for (bi, &gi) in indices.iter().enumerate() {
        for (bj, &gj) in indices.iter().enumerate() {
            let diff = (v_full[(gi, gj)] - v_pair[(bi, bj)]).norm();
            assert!(diff < 1e-12);
        }
    }
}
