use lzlab_core::real::{
    build_re1_pair, eval_cf, fit_quadratic, log_ratio, third_difference_residual, CFModel,
    LogRatioTrace, RealGrid,
};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn leaf() -> impl Strategy<Value = CFModel> {
    prop_oneof![
        (-3.0f64..3.0).prop_map(|a| CFModel::degenerate(a).unwrap()),
        (-3.0f64..3.0, 0.0f64..2.0).prop_map(|(b, s)| CFModel::gaussian(b, s).unwrap()),
        (0.1f64..2.0, any::<bool>()).prop_map(|(l, s)| CFModel::poisson_phase(
            l,
            if s { 1 } else { -1 }
        )
        .unwrap()),
    ]
}

fn model() -> impl Strategy<Value = CFModel> {
    prop_oneof![
        leaf(),
        prop::collection::vec(leaf(), 1..4).prop_map(|f| CFModel::product(f).unwrap()),
    ]
}

fn coarse_grid() -> RealGrid {
    RealGrid::new(-10.0, 10.0, 0.05).unwrap()
}

proptest! {
    #[test]
    fn models_are_hermitian_and_normalized(m in model()) {
        prop_assert_eq!(eval_cf(&m, 0.0), Complex64::new(1.0, 0.0));
        for y in coarse_grid().points() {
            let (a, b) = (eval_cf(&m, y), eval_cf(&m, -y));
            prop_assert!((b - a.conj()).norm() <= 1e-12 * a.norm().max(1e-300));
            prop_assert!(a.norm() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn shift_ratios_are_linear(m in model(), alpha in -3.0f64..3.0) {
        let psi = log_ratio(&m.shifted(alpha), &m, coarse_grid()).unwrap();
        for (y, v) in psi.samples() {
            prop_assert!((v - Complex64::new(0.0, alpha * y)).norm() <= 1e-10);
        }
    }

    #[test]
    fn cascade_and_fit_agree_on_quadratics(
        sigma in (-1.0f64..1.0, -1.0f64..1.0),
        beta in (-2.0f64..2.0, -2.0f64..2.0),
        seed in any::<u64>(),
        noisy in any::<bool>(),
    ) {
        let grid = RealGrid::default();
        let (s, b) = (Complex64::new(sigma.0, sigma.1), Complex64::new(beta.0, beta.1));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values: Vec<Complex64> = grid
            .points()
            .into_iter()
            .map(|y| {
                let noise = if noisy && y != 0.0 {
                    Complex64::new(rng.gen_range(-1e-12..1e-12), rng.gen_range(-1e-12..1e-12))
                } else {
                    Complex64::new(0.0, 0.0)
                };
                s * y * y + b * y + noise
            })
            .collect();
        let psi = LogRatioTrace::from_log_values(grid, values).unwrap();
        let cascade = third_difference_residual(&psi, 0.1).unwrap() <= 1e-9;
        let fit = fit_quadratic(&psi);
        prop_assert!(cascade);
        prop_assert!(fit.residual <= 1e-8);
        prop_assert!((fit.sigma - s).norm() <= 1e-10 && (fit.beta - b).norm() <= 1e-10);
    }

    #[test]
    fn cascade_and_fit_both_reject_cubic_terms(c in 0.01f64..1.0) {
        let psi = LogRatioTrace::from_log_fn(RealGrid::default(), |y| Complex64::new(0.0, c * y * y * y)).unwrap();
        prop_assert!(third_difference_residual(&psi, 0.1).unwrap() > 1e-9);
        prop_assert!(fit_quadratic(&psi).residual > 1e-8);
    }
}

#[test]
fn re1_modulus_identity_on_the_default_grid() {
    let (mu, nu) = build_re1_pair();
    for y in RealGrid::default().points() {
        let want = (y.cos() - 1.0).exp();
        assert!((eval_cf(&mu, y).norm() - want).abs() <= 1e-12);
        assert!((eval_cf(&nu, y).norm() - want).abs() <= 1e-12);
    }
}
