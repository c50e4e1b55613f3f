//! Property-based invariants of the linear-algebra kernel, the measures and
//! the POVM machinery.

use densecap::linalg::*;
use densecap::measures::*;
use densecap::preprocess::*;
use densecap::sampling::{haar_mixed, haar_mixed_factor, haar_pure};
use nalgebra::DMatrix;
use proptest::prelude::*;
use std::f64::consts::PI;

/// SU(2) element from Euler-type angles.
fn su2(a: f64, b: f64, c: f64) -> ComplexMatrix {
    let (ca, sa) = (a.cos(), a.sin());
    ComplexMatrix::from_rows(&[
        vec![C64::from_polar(ca, b), -C64::from_polar(sa, -c)],
        vec![C64::from_polar(sa, c), C64::from_polar(ca, -b)],
    ])
    .unwrap()
}

fn local_rotation(rho: &DensityMatrix, u: &ComplexMatrix, v: &ComplexMatrix) -> DensityMatrix {
    DensityMatrix::new(rho.conjugate_by(&u.kron(v)), rho.dims().to_vec()).unwrap()
}

fn to_nalgebra(m: &ComplexMatrix) -> DMatrix<C64> {
    let n = m.dim();
    DMatrix::from_fn(n, n, |i, j| m[(i, j)])
}

fn angles() -> impl Strategy<Value = (f64, f64, f64)> {
    (0.0..PI, 0.0..2.0 * PI, 0.0..2.0 * PI)
}

fn povm_params() -> impl Strategy<Value = PovmParams> {
    (0.0..=PI, 0.0..2.0 * PI, 0.0..=1.0f64, -1.0..=1.0f64).prop_map(|(theta, phi, lambda, g)| PovmParams {
        theta,
        phi,
        lambda,
        gamma: (1.0 - lambda) * g,
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn partial_traces_commute(seed in any::<u64>(), rank in 1usize..=8) {
        let rho = haar_mixed(&[2, 2, 2], rank, seed).unwrap();
        let stepwise = rho.partial_trace(&[1, 2]).unwrap().partial_trace(&[1]).unwrap();
        let direct = rho.partial_trace(&[2]).unwrap();
        prop_assert!(stepwise.mat().max_abs_diff(direct.mat()) < 1e-10);
    }

    #[test]
    fn entropy_equals_shannon_entropy_of_spectrum(seed in any::<u64>(), rank in 1usize..=4) {
        let rho = haar_mixed(&[2, 2], rank, seed).unwrap();
        let spectrum: Vec<f64> = rho.eigenvalues().into_iter().map(|w| w.max(0.0)).collect();
        let total: f64 = spectrum.iter().sum();
        let p: Vec<f64> = spectrum.iter().map(|w| w / total).collect();
        prop_assert!((von_neumann_entropy(&rho) - shannon_entropy(&p).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn tensor_then_trace_recovers_factors(sa in any::<u64>(), sb in any::<u64>(), ra in 1usize..=2, rb in 1usize..=4) {
        let a = haar_mixed(&[2], ra, sa).unwrap();
        let b = haar_mixed(&[2, 2], rb, sb).unwrap();
        let ab = a.tensor(&b);
        prop_assert!(ab.partial_trace(&[0]).unwrap().mat().max_abs_diff(a.mat()) < 1e-10);
        prop_assert!(ab.partial_trace(&[1, 2]).unwrap().mat().max_abs_diff(b.mat()) < 1e-10);
    }

    #[test]
    fn pure_state_marginals_have_equal_entropy(seed in any::<u64>(), d in 2usize..=6) {
        let psi = haar_pure(&[2, d], seed).unwrap().to_density();
        let sa = von_neumann_entropy(&psi.partial_trace(&[0]).unwrap());
        let sb = von_neumann_entropy(&psi.partial_trace(&[1]).unwrap());
        prop_assert!((sa - sb).abs() < 1e-9);
    }

    #[test]
    fn factored_and_dense_marginals_agree(seed in any::<u64>(), rank in 1usize..=6) {
        let f = haar_mixed_factor(&[2, 2, 2], rank, seed).unwrap();
        let dense = f.to_density();
        for keep in [vec![0], vec![2], vec![0, 2], vec![1, 2]] {
            let a = f.reduced(&keep).unwrap();
            let b = dense.partial_trace(&keep).unwrap();
            prop_assert!(a.mat().max_abs_diff(b.mat()) < 1e-12);
        }
    }

    #[test]
    fn partial_transpose_is_an_involution(seed in any::<u64>(), rank in 1usize..=4) {
        let rho = haar_mixed(&[2, 2], rank, seed).unwrap();
        // The partial transpose need not be PSD, so transpose back by hand.
        let pt = rho.partial_transpose(&[0]).unwrap();
        let mut twice = pt.clone();
        for i in 0..2 { for j in 0..2 { for k in 0..2 { for l in 0..2 {
            twice[(2 * i + k, 2 * j + l)] = pt[(2 * j + k, 2 * i + l)];
        }}}}
        prop_assert_eq!(&twice, rho.mat());
        prop_assert!((pt.trace() - rho.mat().trace()).norm() < 1e-12);
    }

    #[test]
    fn eigendecomposition_matches_nalgebra(seed in any::<u64>(), rank in 1usize..=8) {
        let rho = haar_mixed(&[2, 2, 2], rank, seed).unwrap();
        let (w, v) = eig_hermitian(rho.mat()).unwrap();
        let mut oracle: Vec<f64> = to_nalgebra(rho.mat()).symmetric_eigen().eigenvalues.iter().copied().collect();
        oracle.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (a, b) in w.iter().zip(&oracle) {
            prop_assert!((a - b).abs() < 1e-10);
        }
        // Reassemble V diag(w) V†.
        let n = w.len();
        let mut rebuilt = ComplexMatrix::zeros(n);
        for i in 0..n { for j in 0..n {
            rebuilt[(i, j)] = (0..n).map(|k| v[(i, k)] * w[k] * v[(j, k)].conj()).sum();
        }}
        prop_assert!(rebuilt.sub(rho.mat()).frobenius_norm() < 1e-9);
    }

    #[test]
    fn psd_square_root_squares_back(seed in any::<u64>(), rank in 1usize..=4) {
        let m = haar_mixed(&[2, 2], rank, seed).unwrap().into_mat().scale_real(3.0);
        let r = matrix_sqrt_psd(&m).unwrap();
        prop_assert!(r.matmul(&r).sub(&m).frobenius_norm() < 1e-9);
        prop_assert!(r.is_hermitian(1e-10));
    }

    #[test]
    fn fidelity_and_chsh_are_local_unitary_invariant(seed in any::<u64>(), rank in 1usize..=4, a in angles(), b in angles()) {
        let rho = haar_mixed(&[2, 2], rank, seed).unwrap();
        let rotated = local_rotation(&rho, &su2(a.0, a.1, a.2), &su2(b.0, b.1, b.2));
        prop_assert!((teleportation_fidelity(&rho).unwrap() - teleportation_fidelity(&rotated).unwrap()).abs() < 1e-9);
        prop_assert!((chsh_parameter(&rho).unwrap() - chsh_parameter(&rotated).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn negativity_is_local_unitary_invariant(seed in any::<u64>(), rank in 1usize..=4, a in angles(), b in angles()) {
        let rho = haar_mixed(&[2, 2], rank, seed).unwrap();
        let rotated = local_rotation(&rho, &su2(a.0, a.1, a.2), &su2(b.0, b.1, b.2));
        prop_assert!((negativity(&rho, &[0]).unwrap() - negativity(&rotated, &[0]).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn capacities_never_fall_below_the_classical_bound(seed in any::<u64>(), rank in 1usize..=6) {
        let three = haar_mixed_factor(&[2, 2, 2], rank, seed).unwrap();
        prop_assert!(dcc(&three, &Scenario::two_senders_one_receiver()).unwrap() >= 2.0);
        let four = haar_mixed_factor(&[2, 2, 2, 2], rank.min(4), seed).unwrap();
        prop_assert!(dcc(&four, &Scenario::two_senders_two_receivers()).unwrap() >= 2.0);
        let two = haar_mixed_factor(&[2, 2], rank.min(4), seed).unwrap();
        prop_assert!(dcc(&two, &Scenario::one_sender_one_receiver()).unwrap() >= 1.0);
    }

    #[test]
    fn bell_violation_implies_nonclassical_fidelity(seed in any::<u64>(), rank in 1usize..=4) {
        let rho = haar_mixed(&[2, 2], rank, seed).unwrap();
        if chsh_parameter(&rho).unwrap() > 1.0 {
            prop_assert!(teleportation_fidelity(&rho).unwrap() > CLASSICAL_FIDELITY);
        }
    }

    #[test]
    fn povm_elements_are_complete_and_positive(p in povm_params()) {
        let (ep, em) = povm_elements(&p).unwrap();
        prop_assert!(ep.add(&em).max_abs_diff(&ComplexMatrix::identity(2)) < 1e-10);
        for e in [&ep, &em] {
            prop_assert!(eigvals_hermitian(e).unwrap()[0] >= -1e-10);
        }
    }

    #[test]
    fn outcome_probabilities_sum_to_one(seed in any::<u64>(), p in povm_params(), q in povm_params()) {
        let rho = haar_mixed(&[2, 2], 2, seed).unwrap();
        let scenario = Scenario::one_sender_one_receiver();
        let total: f64 = (0..4)
            .map(|o| apply_povm(&rho, &scenario, ActingSet::Both, &[p, q], &Outcome::tuple(o, 2)).map(|(_, pr)| pr).unwrap_or(0.0))
            .sum();
        prop_assert!((total - 1.0).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn optimized_merits_dominate_the_unprocessed_value(seed in any::<u64>(), rank in 1usize..=4, acting_ix in 1usize..4) {
        let acting = ActingSet::ALL[acting_ix];
        let settings = MeritSettings { budget: SearchBudget { starts: 3, max_iters: 80, tol: 1e-6 }, gamma_mode: GammaMode::Free };
        let f = haar_mixed_factor(&[2, 2], rank, seed).unwrap();
        let scenario = Scenario::one_sender_one_receiver();
        for objective in [Objective::Dcc, Objective::Tf] {
            let r = evaluate_merits(&f, &scenario, acting, objective, &settings, seed ^ 0x5555).unwrap().report;
            prop_assert!(r.o >= r.merit_before - 1e-9);
            prop_assert!(r.a2 >= r.merit_before - 1e-9);
            prop_assert!(r.p_o > 0.0 && r.p_o <= 1.0);
        }
    }
}
