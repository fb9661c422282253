mod common;

use common::*;
use multiportlab::experiment::{compact_evolve, sample_shots, sample_shots_stream};
use multiportlab::hamiltonian::reversible_double;
use multiportlab::linalg::{
    c, evolve, exp_evolution, hermitian_eigen, identity, max_abs_diff, max_abs_diff_vec, principal_log_hamiltonian,
    CMatrix, StateVector,
};
use multiportlab::multiport::{eigensystem, grover_unitary, ExitDistribution};
use multiportlab::scattering::effective_smatrix;
use multiportlab::su3::{su2_decompose, su2_reconstruct, su3_decompose, su3_reconstruct};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn log_then_exp_recovers_unitary(seed in any::<u64>(), n in 2usize..7) {
        let u = random_unitary(&mut rng(seed), n);
        let h = principal_log_hamiltonian(&u).unwrap();
        prop_assert!(max_abs_diff(h.matrix(), &h.matrix().adjoint()) == 0.0);
        let back = exp_evolution(&h, 1.0).unwrap();
        prop_assert!(max_abs_diff(back.matrix(), u.matrix()) < 1e-10);
        for e in h.energies() {
            prop_assert!(e.abs() <= std::f64::consts::PI);
        }
    }

    #[test]
    fn evolution_is_additive(seed in any::<u64>(), n in 2usize..6, a in 0usize..12, b in 0usize..12) {
        let mut r = rng(seed);
        let u = random_unitary(&mut r, n);
        let psi = StateVector::from_amplitudes(random_state(&mut r, n)).unwrap();
        let ab = evolve(&u, &evolve(&u, &psi, a).unwrap(), b).unwrap();
        let direct = evolve(&u, &psi, a + b).unwrap();
        prop_assert!(max_abs_diff_vec(ab.amplitudes(), direct.amplitudes()) < 1e-12);
        prop_assert!((direct.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eigensystem_diagonalizes(seed in any::<u64>(), n in 2usize..7) {
        let u = random_unitary(&mut rng(seed), n);
        let pairs = eigensystem(&u).unwrap();
        let v = CMatrix::from_columns(&pairs.iter().map(|p| p.vector.amplitudes().clone()).collect::<Vec<_>>());
        prop_assert!(max_abs_diff(&(v.adjoint() * &v), &identity(n)) < 1e-10);
        for p in &pairs {
            let v = p.vector.amplitudes();
            prop_assert!(max_abs_diff_vec(&(u.matrix() * v), &(v * p.value)) < 1e-10);
        }
    }

    #[test]
    fn su3_decomposition_is_linear(seed in any::<u64>(), a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let mut r = rng(seed);
        let (h1, h2) = (random_hermitian(&mut r, 3), random_hermitian(&mut r, 3));
        let mix = &h1 * c(a, 0.0) + &h2 * c(b, 0.0);
        let (d1, d2, dm) = (su3_decompose(&h1).unwrap(), su3_decompose(&h2).unwrap(), su3_decompose(&mix).unwrap());
        for j in 0..9 {
            prop_assert!((dm.get(j) - (a * d1.get(j) + b * d2.get(j))).abs() < 1e-12);
        }
        prop_assert!(max_abs_diff(&su3_reconstruct(&d1), &h1) < 1e-12);
    }

    #[test]
    fn su2_round_trip(seed in any::<u64>()) {
        let h = random_hermitian(&mut rng(seed), 2);
        prop_assert!(max_abs_diff(&su2_reconstruct(&su2_decompose(&h).unwrap()), &h) < 1e-14);
    }

    #[test]
    fn doubling_is_an_involution(seed in any::<u64>(), n in 1usize..6) {
        let u = random_unitary(&mut rng(seed), n);
        let h = reversible_double(&u).unwrap();
        prop_assert!(max_abs_diff(&(h.matrix() * h.matrix()), &identity(2 * n)) < 1e-12);
        let (e, _) = hermitian_eigen(h.matrix());
        prop_assert!(e.iter().all(|x| (x.abs() - 1.0).abs() < 1e-10));
    }

    #[test]
    fn networks_are_lossless_and_match_path_sums(seed in any::<u64>()) {
        let mut r = rng(seed);
        let net = random_lossless_network(&mut r, 12, 50);
        let s = effective_smatrix(&net).unwrap();
        prop_assert!(s.residual() <= 1e-10);
        let (paths, _) = bounce_sum(&net, 50);
        prop_assert!(max_abs_diff(s.matrix(), &paths) <= 1e-8);
    }

    #[test]
    fn compact_matches_dense(seed in any::<u64>(), steps in 0usize..40) {
        let psi = StateVector::from_amplitudes(random_state(&mut rng(seed), 3)).unwrap();
        let a = compact_evolve(&psi, steps).unwrap();
        let b = evolve(&grover_unitary(3).unwrap(), &psi, steps).unwrap();
        prop_assert!(max_abs_diff_vec(a.amplitudes(), b.amplitudes()) <= 1e-12);
    }

    #[test]
    fn shots_sum_and_repeat(seed in any::<u64>(), shots in 0u64..5000, p in 0.0f64..1.0) {
        let d = ExitDistribution::new(0, vec![p, 1.0 - p]).unwrap();
        let a = sample_shots(&d, shots, seed);
        prop_assert_eq!(a.counts.iter().sum::<u64>(), shots);
        prop_assert_eq!(a, sample_shots(&d, shots, seed));
    }
}

#[test]
fn compact_norm_after_a_million_steps() {
    let psi = StateVector::from_amplitudes(random_state(&mut rng(7), 3)).unwrap();
    let out = compact_evolve(&psi, 1_000_000).unwrap();
    assert!((out.norm() - 1.0).abs() <= 1e-9);
}

#[test]
fn frequencies_stay_within_four_sigma() {
    let d = ExitDistribution::new(0, vec![1.0 / 9.0, 4.0 / 9.0, 4.0 / 9.0]).unwrap();
    let shots = 10_000u64;
    let mut inside = 0;
    for stream in 0..100 {
        let r = sample_shots_stream(&d, shots, 99, stream);
        let ok = r
            .counts
            .iter()
            .zip(&d.probabilities)
            .all(|(&n, &p)| (n as f64 / shots as f64 - p).abs() <= 4.0 * (p * (1.0 - p) / shots as f64).sqrt());
        inside += usize::from(ok);
    }
    assert!(inside >= 99, "{inside} of 100 trials within 4 sigma");
}

#[test]
fn walk_distribution_has_period_two() {
    let g = grover_unitary(3).unwrap();
    let psi = StateVector::from_amplitudes(random_state(&mut rng(3), 3)).unwrap();
    for steps in 0..10 {
        let a = multiportlab::experiment::walk_distribution(&g, &psi, steps).unwrap();
        let b = multiportlab::experiment::walk_distribution(&g, &psi, steps + 2).unwrap();
        for (x, y) in a.probabilities.iter().zip(&b.probabilities) {
            assert!((x - y).abs() < 1e-12);
        }
    }
}

#[test]
fn degenerate_doublings_diagonalize() {
    // Seed 6 produced a 12x12 doubling where the tridiagonal solver alone
    // returned vectors with residual near 7e-2.
    let mut r = rng(6);
    for i in 0..40 {
        let u = random_unitary(&mut r, 2 + i % 5);
        let h = reversible_double(&u).unwrap();
        let (e, v) = hermitian_eigen(h.matrix());
        let lam = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(e.len(), e.iter().map(|&x| c(x, 0.0))));
        assert!(max_abs_diff(&(h.matrix() * &v), &(&v * lam)) < 1e-12);
        let n = v.nrows();
        assert!(max_abs_diff(&(v.adjoint() * &v), &identity(n)) < 1e-12);
    }
}
