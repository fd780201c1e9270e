use faer::Mat;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use defectloc::criterion::{
    constraint_residual, minimize_observed, objective_fw4, project, ConstraintVector, ExpandedVector, Method,
    OptimizerConfig,
};
use defectloc::farfield::{inner, MeasurementOperator};

fn operator(n: usize, seed: u64) -> MeasurementOperator {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w = Mat::from_fn(n, n, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    MeasurementOperator::from_matrix(w, 10.0, Complex64::new(0.03, 0.03))
}

fn constraint(n: usize, seed: u64) -> ConstraintVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ConstraintVector::new(
        (0..n)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect(),
    )
    .unwrap()
}

fn method() -> impl Strategy<Value = Method> {
    prop_oneof![
        Just(Method::SteepestDescent),
        Just(Method::GradientProjection),
        Just(Method::ProjectedNewton)
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn iterates_stay_feasible_and_costs_decrease(n in 2usize..12, seed in any::<u64>(), method in method()) {
        let op = operator(n, seed);
        let c = constraint(n, seed ^ 0x5a5a);
        let mut costs = Vec::new();
        let mut worst = 0.0f64;
        let cfg = OptimizerConfig { method, max_iter: 60, ..Default::default() };
        let r = minimize_observed(&c, &op, &cfg, |it| {
            costs.push(it.cost);
            worst = worst.max(constraint_residual(it.x, &c));
        }).unwrap();
        prop_assert!(r.value >= 0.0);
        prop_assert!(r.iterations >= 1 && r.iterations <= 60);
        prop_assert!(r.constraint_residual <= 1e-10);
        if method != Method::SteepestDescent {
            prop_assert!(worst <= 1e-10, "{}", worst);
        }
        prop_assert!(costs.windows(2).all(|w| w[1] <= w[0]));
        let start = objective_fw4(&project(&ExpandedVector::zeros(n), &c), &op);
        prop_assert!(r.value <= start);
    }

    #[test]
    fn objective_is_the_modulus_of_the_complex_form(n in 1usize..10, seed in any::<u64>()) {
        let op = operator(n, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
        let psi: Vec<Complex64> = (0..n).map(|_| Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0))).collect();
        let w_psi: Vec<Complex64> = (0..n).map(|i| (0..n).map(|j| op.w[(i, j)] * psi[j]).sum()).collect();
        let expected = inner(&w_psi, &psi).norm_sqr();
        let got = objective_fw4(&ExpandedVector::from_complex(&psi), &op);
        prop_assert!(got >= 0.0);
        prop_assert!((got - expected).abs() <= 1e-12 * expected.max(1e-300));
    }

    #[test]
    fn projection_is_idempotent_and_feasible(n in 1usize..20, seed in any::<u64>(), scale in 1e-3f64..1e3) {
        let c = constraint(n, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(2));
        let x = ExpandedVector((0..2 * n).map(|_| scale * rng.random_range(-1.0..1.0)).collect());
        let p = project(&x, &c);
        let pp = project(&p, &c);
        let tol = 1e-13 * (1.0 + scale);
        prop_assert!(p.iter().zip(pp.iter()).all(|(a, b)| (a - b).abs() <= tol));
        prop_assert!(constraint_residual(&p, &c) <= 1e-12 * (1.0 + scale));
    }
}

#[test]
fn zero_operator_is_converged_at_first_iteration_for_every_method() {
    let op = MeasurementOperator::from_matrix(Mat::zeros(5, 5), 10.0, Complex64::new(0.0, 0.0));
    let c = constraint(5, 3);
    for method in [
        Method::SteepestDescent,
        Method::GradientProjection,
        Method::ProjectedNewton,
    ] {
        let r = minimize_observed(
            &c,
            &op,
            &OptimizerConfig {
                method,
                ..Default::default()
            },
            |_| {},
        )
        .unwrap();
        assert_eq!((r.value, r.iterations, r.converged), (0.0, 1, true));
    }
}
