use causalkit::linalg::{hs_expand, kron, partial_trace, project_psd};
use causalkit::localization::f_pm;
use causalkit::process::cj::{random_channel, random_instrument, RandomInstrumentSpec};
use causalkit::process::ctc::deutsch_fixed_point;
use causalkit::process::ocb::{diagonal_instrument_optimum, ocb_process};
use causalkit::process::separability::{causal_separability, DEFAULT_MAX_ITER, DEFAULT_TOL};
use causalkit::process::validity::monte_carlo_normalization;
use causalkit::process::{born, maximally_mixed_process, ordered_process, ordered_process_b_first, ProcessMatrix, SystemDims};
use causalkit::rng::stream_rng;
use causalkit::Operator;
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;

fn random_matrix(side: usize, seed: u64) -> DMatrix<Complex64> {
    let mut rng = stream_rng(seed, 0);
    DMatrix::from_fn(side, side, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

fn hermitian(side: usize, seed: u64) -> DMatrix<Complex64> {
    let m = random_matrix(side, seed);
    (&m + m.adjoint()).scale(0.5)
}

fn random_density(d: usize, seed: u64) -> Operator {
    let g = random_matrix(d, seed);
    let rho = &g * g.adjoint();
    let tr = rho.trace();
    Operator::single(rho / tr).unwrap()
}

fn random_ordered(seed: u64, forward: bool) -> ProcessMatrix {
    let mut rng = stream_rng(seed, 1);
    let rho = random_density(2, seed);
    let choi = random_channel(2, 2, &mut rng).operator().transpose();
    if forward {
        ordered_process(&rho, &choi, 2).unwrap()
    } else {
        ordered_process_b_first(&rho, &choi, 2).unwrap()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn kron_trace_factorizes(s1 in any::<u64>(), s2 in any::<u64>()) {
        let a = Operator::single(random_matrix(2, s1)).unwrap();
        let b = Operator::single(random_matrix(3, s2)).unwrap();
        let lhs = kron(&a, &b).trace();
        prop_assert!((lhs - a.trace() * b.trace()).norm() < 1e-12);
        let c = Operator::single(random_matrix(2, s1 ^ s2)).unwrap();
        let left = kron(&kron(&a, &b), &c);
        let right = kron(&a, &kron(&b, &c));
        prop_assert!(left.max_abs_diff(&right) < 1e-14);
        let full = partial_trace(&left, &[]).unwrap();
        prop_assert!((full.matrix()[(0, 0)] - left.trace()).norm() < 1e-12);
    }

    #[test]
    fn pauli_expansion_parseval(seed in any::<u64>()) {
        let a = Operator::new(hermitian(8, seed), vec![2, 2, 2]).unwrap();
        let e = hs_expand(&a).unwrap();
        prop_assert!(e.max_imag() < 1e-12);
        let sum: f64 = e.iter().map(|(_, w)| w.norm_sqr()).sum();
        prop_assert!((sum * 8.0 - a.frobenius_norm().powi(2)).abs() < 1e-10);
    }

    #[test]
    fn psd_projection_idempotent(seed in any::<u64>()) {
        let a = Operator::new(hermitian(6, seed), vec![2, 3]).unwrap();
        let p = project_psd(&a).unwrap();
        prop_assert!(p.min_eigenvalue().unwrap() >= -1e-12);
        prop_assert!(project_psd(&p).unwrap().max_abs_diff(&p) < 1e-12);
    }

    #[test]
    fn born_outcomes_sum_to_one(seed in any::<u64>(), outcomes in 1usize..4, rank in 1usize..3) {
        let mut rng = stream_rng(seed, 2);
        let spec = RandomInstrumentSpec { d_in: 2, d_out: 2, outcomes, rank };
        let ia = random_instrument(spec, &mut rng);
        let ib = random_instrument(spec, &mut rng);
        for w in [ocb_process(), random_ordered(seed, true), maximally_mixed_process(SystemDims::qubits())] {
            let mut total = 0.0;
            for ma in ia.elements() {
                for mb in ib.elements() {
                    let p = born(&w, ma, mb).unwrap();
                    prop_assert!(p > -1e-9);
                    total += p;
                }
            }
            prop_assert!((total - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn ordered_processes_stay_below_three_quarters(seed in any::<u64>(), lambda in 0.0f64..1.0) {
        let fwd = random_ordered(seed, true);
        let back = random_ordered(seed.wrapping_add(1), false);
        let mix = fwd.mix(&back, lambda).unwrap();
        for w in [&fwd, &back, &mix] {
            prop_assert!(diagonal_instrument_optimum(w).unwrap() <= 0.75 + 1e-12);
        }
    }

    #[test]
    fn valid_processes_pass_monte_carlo(seed in any::<u64>()) {
        let w = random_ordered(seed, seed % 2 == 0);
        let mut rng = stream_rng(seed, 3);
        let dev = monte_carlo_normalization(w.operator(), w.dims(), 20, &mut rng).unwrap();
        prop_assert!(dev < 1e-9);
    }

    #[test]
    fn ctc_fixed_point_is_a_state(seed in any::<u64>()) {
        let g = random_matrix(4, seed);
        let u = Operator::new(g.qr().q(), vec![2, 2]).unwrap();
        let rho_in = random_density(2, seed ^ 0x5555);
        let fp = deutsch_fixed_point(&u, &rho_in, 1e-10, 200_000).unwrap();
        prop_assert!(fp.residual < 1e-10);
        prop_assert!((fp.rho.trace().re - 1.0).abs() < 1e-12);
        prop_assert!(fp.rho.min_eigenvalue().unwrap() > -1e-12);
    }

    #[test]
    fn smeared_functions_real_and_even(x in 0.0f64..3.0, eps in 0.3f64..3.0, m in 0.3f64..3.0) {
        let p = f_pm(x, eps, m).unwrap();
        let q = f_pm(-x, eps, m).unwrap();
        prop_assert!(p.imag_residual < 1e-8);
        prop_assert!((p.f_plus - q.f_plus).abs() < 1e-8);
        prop_assert!((p.f_minus - q.f_minus).abs() < 1e-8);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn mixtures_of_ordered_processes_are_separable(seed in any::<u64>(), lambda in 0.1f64..0.9) {
        let w = random_ordered(seed, true).mix(&random_ordered(seed.wrapping_add(7), false), lambda).unwrap();
        let r = causal_separability(&w, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        prop_assert!(r.is_separable(), "{:?}", r);
        if let causalkit::process::separability::Separability::Separable { a_before_b, b_before_a, .. } = r {
            prop_assert!((&a_before_b + &b_before_a).max_abs_diff(w.operator()) < 1e-6);
        }
    }
}
