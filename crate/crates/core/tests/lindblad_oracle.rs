mod common;

use nalgebra::DVector;
use proptest::prelude::*;
use rotor_open_qs::densmat::von_neumann_entropy;
use rotor_open_qs::lindblad::{continuous_evolve, kicked_flow_step, kicked_trajectory, LindbladGenerator};
use rotor_open_qs::{DensityMatrix, C64};

use common::{c, CMat};

fn as_density(x: &CMat) -> DensityMatrix {
    DensityMatrix::from_entries_unchecked(x.clone()).unwrap()
}

#[test]
fn sandwich_terms_equal_half_shift_sum() {
    let m = 5usize;
    let d = 2 * m + 1;
    let gen = LindbladGenerator::kicked(m, 1.0, 1.0).unwrap();
    let mut rng = common::rng(1);
    let rho = common::random_density(&mut rng, d, 0, d);
    let cos = gen.cos_op();
    let sin = gen.sin_op();
    let lhs = cos * &rho * cos + sin * &rho * sin;
    let up = common::shift_up(d);
    let rhs = (&up * &rho * up.adjoint() + up.adjoint() * &rho * &up) * c(0.5);
    assert!((lhs - rhs).camax() < 1e-12);
    assert!((cos - common::cos_theta(d)).camax() == 0.0);
    assert!((sin - common::sin_theta(d)).camax() == 0.0);
}

#[test]
fn flow_step_matches_dense_liouvillian_on_a_cascade() {
    let (m, g) = (8usize, 0.1414);
    let d = 2 * m + 1;
    let gen = LindbladGenerator::kicked(m, g, 1.0).unwrap();
    let zero = CMat::zeros(d, d);
    let l = common::liouvillian(&zero, &[common::cos_theta(d), common::sin_theta(d)], g * g / 2.0);
    let rho = DensityMatrix::momentum_eigenstate(gen.basis(), 0).unwrap();
    let dense = common::unvec(&(l.exp() * common::vec_of(rho.entries())), d);
    let out = kicked_flow_step(&gen, 1.0, &rho).unwrap();
    for i in 0..d {
        assert!((out.entries()[(i, i)] - dense[(i, i)]).norm() < 1e-10);
    }
    // Two-step spread is second order in the rate.
    let gamma = g * g / 2.0;
    assert!(out.entries()[(m + 1, m + 1)].re > 0.4 * gamma);
    assert!(out.entries()[(m + 2, m + 2)].re < gamma * gamma);
}

#[test]
fn continuous_evolution_matches_dense_exponential() {
    let (m, g_prime) = (8usize, 0.1414);
    let d = 2 * m + 1;
    let gen = LindbladGenerator::continuous(m, g_prime, 1.0).unwrap();
    let l = common::liouvillian(
        &common::kinetic(d, 1.0),
        &[common::cos_theta(d), common::sin_theta(d)],
        gen.gamma(),
    );

    // Diagonal start, long time: the coherent part drops out.
    let rho = DensityMatrix::momentum_eigenstate(gen.basis(), 0).unwrap();
    let t = 3000.0;
    let tr = continuous_evolve(&gen, &rho, t, 1.0).unwrap();
    let dense = common::unvec(&((&l * c(t)).exp() * common::vec_of(rho.entries())), d);
    assert!(common::trace_distance(tr.final_state.entries(), &dense) < 1e-6);
    let s = tr.records.last().unwrap().entropy;
    assert!(((d as f64).ln() - s) / (d as f64).ln() < 0.01, "S = {s}");
    assert!(tr.records.windows(2).all(|w| w[1].entropy >= w[0].entropy - 1e-9));
    assert!(tr.records.iter().all(|r| r.trace_dev < 1e-8));

    // Coherent start, short time.
    let mut psi = DVector::<C64>::zeros(d);
    psi[m] = c(1.0);
    psi[m + 1] = C64::new(0.0, 1.0);
    let rho = DensityMatrix::pure(&psi).unwrap();
    let t = 5.0;
    let tr = continuous_evolve(&gen, &rho, t, 1e-3).unwrap();
    let dense = common::unvec(&((&l * c(t)).exp() * common::vec_of(rho.entries())), d);
    assert!(common::trace_distance(tr.final_state.entries(), &dense) < 1e-6);
}

#[test]
fn kicked_map_is_a_time_independent_semigroup() {
    let m = 4usize;
    let d = 2 * m + 1;
    let gen = LindbladGenerator::kicked(m, 0.5, 1.0).unwrap();
    let one = common::superoperator(d, |x| kicked_flow_step(&gen, 0.7, &as_density(x)).unwrap().into_entries());
    let mut three = CMat::identity(d * d, d * d);
    for _ in 0..3 {
        three = &one * three;
    }
    let four = &one * &one * &one * &one;
    let seven = &three * &four;
    assert!((&four * &three - &seven).camax() < 1e-12);

    let mut rng = common::rng(7);
    let rho = DensityMatrix::new(common::random_density(&mut rng, d, 0, d)).unwrap();
    let tr = kicked_trajectory(&gen, 0.7, &rho, 7).unwrap();
    let expected = common::unvec(&(&seven * common::vec_of(rho.entries())), d);
    assert!((tr.final_state.entries() - expected).camax() < 1e-12);
}

#[test]
fn flow_step_is_completely_positive() {
    let m = 3usize;
    let d = 2 * m + 1;
    let gen = LindbladGenerator::kicked(m, 0.9, 1.0).unwrap();
    let choi = common::choi(d, |x| kicked_flow_step(&gen, 0.3, &as_density(x)).unwrap().into_entries());
    assert!(common::eigvals(&choi)[0] > -1e-12);
}

#[test]
fn diagonal_states_stay_diagonal() {
    let gen = LindbladGenerator::kicked(6, 0.4, 1.0).unwrap();
    let rho = DensityMatrix::diagonal(&(0..13).map(|i| if i == 6 || i == 7 { 0.5 } else { 0.0 }).collect::<Vec<_>>()).unwrap();
    let tr = kicked_trajectory(&gen, 1.0, &rho, 20).unwrap();
    let e = tr.final_state.entries();
    for i in 0..13 {
        for j in 0..13 {
            if i != j {
                assert_eq!(e[(i, j)], C64::new(0.0, 0.0));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn dissipator_is_traceless_and_hermiticity_preserving(seed in any::<u64>(), g in 0.0f64..2.0) {
        let m = 6usize;
        let d = 2 * m + 1;
        let gen = LindbladGenerator::kicked(m, g, 1.0).unwrap();
        let mut rng = common::rng(seed);
        let rho = common::random_density(&mut rng, d, 1, d - 2);
        let out = gen.dissipator(&rho).unwrap();
        prop_assert!(out.trace().norm() < 1e-12);
        prop_assert!((&out - out.adjoint()).camax() < 1e-14);
        let dense = gen.dissipator_dense(&rho).unwrap();
        prop_assert!((out - dense).camax() < 1e-12);
    }

    #[test]
    fn flow_step_keeps_states_valid_and_mixes(seed in any::<u64>(), g in 0.0f64..1.0, tau in 0.0f64..3.0) {
        let m = 6usize;
        let d = 2 * m + 1;
        let gen = LindbladGenerator::kicked(m, g, 1.0).unwrap();
        let mut rng = common::rng(seed);
        let rho = DensityMatrix::new(common::random_density(&mut rng, d, 0, d)).unwrap();
        let out = kicked_flow_step(&gen, tau, &rho).unwrap();
        prop_assert!(out.validate().is_ok());
        prop_assert!((out.trace().re - 1.0).abs() < 1e-12);
        prop_assert!(von_neumann_entropy(&out).unwrap() >= von_neumann_entropy(&rho).unwrap() - 1e-9);
    }
}
