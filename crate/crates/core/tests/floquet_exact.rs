mod common;

use std::f64::consts::PI;

use nalgebra::DVector;
use proptest::prelude::*;
use rotor_open_qs::densmat::trace_distance_matrix;
use rotor_open_qs::floquet::{
    evolve_pure, reduced_trajectory, BathSpec, FloquetOperator, KickMethod, KickedSystemParams,
};
use rotor_open_qs::kraus::KrausChannel;
use rotor_open_qs::{DensityMatrix, MomentumBasis, C64};

use common::{c, CMat};

fn free_part(cutoff: usize, tau: f64, mass: f64) -> CMat {
    common::diag_unitary(&common::kinetic(2 * cutoff + 1, mass), tau)
}

#[test]
fn interior_columns_match_dense_exponential() {
    let (g, tau, m_s, m_b) = (0.5, 1.0, 1.0, 7.0);
    let (ms, mb) = (12usize, 12usize);
    let (ds, db) = (2 * ms + 1, 2 * mb + 1);
    let p = KickedSystemParams::new(g, tau, m_s, m_b, ms, mb).unwrap();
    let op = FloquetOperator::new(p).unwrap();
    let u = op.to_matrix();

    let coupling = common::cos_theta(ds).kronecker(&common::cos_theta(db))
        + common::sin_theta(ds).kronecker(&common::sin_theta(db));
    let kick = (coupling * C64::new(0.0, -g)).exp();
    let oracle = kick * free_part(ms, tau, m_s).kronecker(&free_part(mb, tau, m_b));

    let interior = 3i64;
    for a in -interior..=interior {
        for b in -interior..=interior {
            let col = op.index(a, b).unwrap();
            let diff = (u.column(col) - oracle.column(col)).camax();
            assert!(diff < 1e-9, "column ({a}, {b}) differs by {diff}");
        }
    }
}

#[test]
fn evolution_is_unitary_in_the_interior() {
    let p = KickedSystemParams::new(0.8, 1.3, 1.0, 20.0, 14, 14).unwrap();
    let op = FloquetOperator::new(p).unwrap();
    let u = op.to_matrix();
    let w = op.boundary_band() as i64;
    let inner: Vec<usize> = (-(14 - w)..=(14 - w))
        .flat_map(|a| (-(14 - w)..=(14 - w)).map(move |b| (a, b)))
        .map(|(a, b)| op.index(a, b).unwrap())
        .collect();
    let gram = u.adjoint() * &u;
    for &i in &inner {
        for &j in &inner {
            let expected = if i == j { 1.0 } else { 0.0 };
            assert!((gram[(i, j)] - c(expected)).norm() < 1e-10);
        }
    }
    assert!(op.interior_deficiency() <= 1e-10);
}

#[test]
fn kick_conserves_total_momentum() {
    let p = KickedSystemParams::new(1.1, 0.9, 1.0, 30.0, 15, 15).unwrap();
    let op = FloquetOperator::new(p).unwrap();
    let mut psi = DVector::<C64>::zeros(op.dim());
    psi[op.index(2, -1).unwrap()] = c(0.6);
    psi[op.index(-3, 4).unwrap()] = C64::new(0.0, 0.8);
    let out = evolve_pure(&op, &psi, 4).unwrap();
    for state in &out {
        for a in -15i64..=15 {
            for b in -15i64..=15 {
                if a + b != 1 {
                    assert_eq!(state[op.index(a, b).unwrap()], c(0.0));
                }
            }
        }
    }
}

#[test]
fn one_kick_matches_channel_for_diagonal_baths() {
    let (g, tau, m_s, m_b) = (0.3, 1.0, 1.0, 3.0);
    let (ms, mb) = (10usize, 40usize);
    let p = KickedSystemParams::new(g, tau, m_s, m_b, ms, mb).unwrap();
    let op = FloquetOperator::new(p).unwrap();
    let channel = KrausChannel::from_physical(g, tau, m_s, ms).unwrap();
    let mut rng = common::rng(3);
    let system0 = DensityMatrix::new(common::random_density(&mut rng, 2 * ms + 1, 6, 9)).unwrap();
    let expected = channel.apply_bessel(&system0).unwrap();
    for bath in [
        BathSpec::ground(),
        BathSpec::flat(5),
        BathSpec::thermal(12, 0.2, m_b).unwrap(),
    ] {
        let traj = reduced_trajectory(&op, &system0, &bath, 1).unwrap();
        let d = trace_distance_matrix(traj[1].system.entries(), expected.entries());
        assert!(d < 1e-12, "distance {d}");
    }
}

#[test]
fn frozen_bath_equals_angle_averaged_system_unitary() {
    let (g, tau, m_s, n_kicks) = (0.3, 1.0, 1.0, 3usize);
    let (ms, mb) = (14usize, 20usize);
    let p = KickedSystemParams::new(g, tau, m_s, f64::INFINITY, ms, mb).unwrap();
    let op = FloquetOperator::new(p).unwrap();
    let system0 = DensityMatrix::momentum_eigenstate(MomentumBasis::new(ms), 0).unwrap();
    let traj = reduced_trajectory(&op, &system0, &BathSpec::ground(), n_kicks).unwrap();

    // With the bath angle conserved, the system sees exp(-ig cos(θ - φ))
    // for a fixed uniformly random φ.
    let d = 2 * ms + 1;
    let free = free_part(ms, tau, m_s);
    let points = 64;
    let mut average = CMat::zeros(d, d);
    for j in 0..points {
        let phi = 2.0 * PI * j as f64 / points as f64;
        let gen = (common::cos_theta(d) * c(phi.cos()) + common::sin_theta(d) * c(phi.sin())) * C64::new(0.0, -g);
        let step = gen.exp() * &free;
        let mut rho = system0.entries().clone();
        for _ in 0..n_kicks {
            rho = &step * rho * step.adjoint();
        }
        average += rho / c(points as f64);
    }
    let dist = trace_distance_matrix(traj[n_kicks].system.entries(), &average);
    assert!(dist < 1e-10, "distance {dist}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn angle_grid_kick_matches_bessel_kick(g in 0.0f64..2.0, tau in 0.1f64..3.0) {
        let p = KickedSystemParams::new(g, tau, 1.0, 10.0, 12, 12).unwrap();
        let a = FloquetOperator::new(p).unwrap();
        let b = FloquetOperator::with_method(p, KickMethod::AngleGrid(256)).unwrap();
        let mut rng = common::rng((g * 1e6) as u64);
        let rho = common::random_density(&mut rng, a.dim(), 0, a.dim());
        let psi = rho.column(0).into_owned();
        prop_assert!((a.apply(&psi).unwrap() - b.apply(&psi).unwrap()).camax() < 1e-10);
    }
}
