//! The quartic objective `f(x) = (xᵀ W_R x)² + (xᵀ W_I x)² = |<Wψ, ψ>|²`
//! and its derivatives in the expanded real representation.

use faer::Mat;

use super::dense::{dot, matvec};
use super::ExpandedVector;
use crate::farfield::MeasurementOperator;

/// `W_R x`, `W_I x` and the two quadratic forms at one point.
#[derive(Debug, Clone)]
pub(crate) struct QuadraticForms {
    pub wr_x: Vec<f64>,
    pub wi_x: Vec<f64>,
    pub re: f64,
    pub im: f64,
}

impl QuadraticForms {
    pub fn at(x: &[f64], op: &MeasurementOperator) -> Self {
        let wr_x = matvec(&op.w_r_expanded, x);
        let wi_x = matvec(&op.w_i_expanded, x);
        let re = dot(x, &wr_x);
        let im = dot(x, &wi_x);
        Self { wr_x, wi_x, re, im }
    }

    pub fn value(&self) -> f64 {
        self.re * self.re + self.im * self.im
    }

    pub fn gradient(&self) -> Vec<f64> {
        self.wr_x
            .iter()
            .zip(&self.wi_x)
            .map(|(a, b)| 4.0 * (self.re * a + self.im * b))
            .collect()
    }
}

fn check_dim(x: &ExpandedVector, op: &MeasurementOperator) {
    assert_eq!(x.len(), 2 * op.dim(), "expanded vector has the wrong length");
}

/// `|<Wψ, ψ>|²` evaluated through the expanded matrices.
pub fn objective_fw4(x: &ExpandedVector, op: &MeasurementOperator) -> f64 {
    check_dim(x, op);
    QuadraticForms::at(x, op).value()
}

/// `4 W_R x (xᵀ W_R x) + 4 W_I x (xᵀ W_I x)`
pub fn gradient_fw4(x: &ExpandedVector, op: &MeasurementOperator) -> ExpandedVector {
    check_dim(x, op);
    ExpandedVector(QuadraticForms::at(x, op).gradient())
}

/// `8 W_R x ⊗ W_R x + 4 W_R (xᵀ W_R x) + 8 W_I x ⊗ W_I x + 4 W_I (xᵀ W_I x)`
pub fn hessian_fw4(x: &ExpandedVector, op: &MeasurementOperator) -> Mat<f64> {
    check_dim(x, op);
    let q = QuadraticForms::at(x, op);
    hessian_from_forms(&q, op)
}

pub(crate) fn hessian_from_forms(q: &QuadraticForms, op: &MeasurementOperator) -> Mat<f64> {
    let n = q.wr_x.len();
    Mat::from_fn(n, n, |r, c| {
        8.0 * q.wr_x[r] * q.wr_x[c]
            + 4.0 * q.re * op.w_r_expanded[(r, c)]
            + 8.0 * q.wi_x[r] * q.wi_x[c]
            + 4.0 * q.im * op.w_i_expanded[(r, c)]
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criterion::test_support::{random_expanded, random_operator};
    use crate::farfield::inner;
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn vanishes_at_origin() {
        let op = random_operator(6, 1);
        let zero = ExpandedVector::zeros(6);
        assert_eq!(objective_fw4(&zero, &op), 0.0);
        assert!(gradient_fw4(&zero, &op).iter().all(|&g| g == 0.0));
        assert_eq!(hessian_fw4(&zero, &op).norm_l2(), 0.0);
    }

    #[test]
    fn zero_operator_gives_zero() {
        let op = MeasurementOperator::from_matrix(Mat::zeros(5, 5), 10.0, Complex64::new(0.1, 0.1));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..5 {
            assert_eq!(objective_fw4(&random_expanded(5, &mut rng), &op), 0.0);
        }
    }

    #[test]
    fn matches_complex_arithmetic() {
        let op = random_operator(7, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let x = random_expanded(7, &mut rng);
            let psi = x.to_complex();
            let wpsi: Vec<Complex64> = (0..7).map(|i| (0..7).map(|j| op.w[(i, j)] * psi[j]).sum()).collect();
            let expected = inner(&wpsi, &psi).norm_sqr();
            let got = objective_fw4(&x, &op);
            assert!(
                (got - expected).abs() <= 1e-12 * expected.max(1e-300),
                "{got} vs {expected}"
            );
        }
    }

    #[test]
    fn gradient_is_cubic_homogeneous() {
        let op = random_operator(5, 5);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let x = random_expanded(5, &mut rng);
        let x2 = ExpandedVector(x.iter().map(|v| 2.0 * v).collect());
        let g = gradient_fw4(&x, &op);
        let g2 = gradient_fw4(&x2, &op);
        for (a, b) in g.iter().zip(g2.iter()) {
            assert!((b - 8.0 * a).abs() <= 1e-12 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn hessian_is_symmetric() {
        let op = random_operator(6, 7);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let h = hessian_fw4(&random_expanded(6, &mut rng), &op);
        for r in 0..12 {
            for c in 0..12 {
                assert_eq!(h[(r, c)], h[(c, r)]);
            }
        }
    }
}
