//! Orthogonal projection onto the affine hyperplane `<ψ, g> = 1`.
//!
//! In complex form `P ψ = ψ - <ψ, g> g / ‖g‖² + g / ‖g‖²`. Its linear part
//! removes the components along `g` and `i g`, which in the expanded real
//! representation are the two orthogonal vectors `(Re g; Im g)` and
//! `(-Im g; Re g)`.

use faer::Mat;

use super::dense::{axpy, dot};
use super::objective::QuadraticForms;
use super::{ConstraintVector, ExpandedVector};
use crate::farfield::MeasurementOperator;

/// Linear part of the projector applied to `v`.
pub fn apply_linear_part(v: &[f64], c: &ConstraintVector) -> Vec<f64> {
    let (re, im) = (dot(v, &c.g_expanded), dot(v, &c.ig_expanded));
    let mut out = v.to_vec();
    axpy(-re / c.norm_sq, &c.g_expanded, &mut out);
    axpy(-im / c.norm_sq, &c.ig_expanded, &mut out);
    out
}

/// `P x`; the result satisfies `<ψ, g> = 1`.
pub fn project(x: &ExpandedVector, c: &ConstraintVector) -> ExpandedVector {
    assert_eq!(x.len(), c.g_expanded.len(), "expanded vector has the wrong length");
    let mut out = apply_linear_part(x, c);
    axpy(1.0 / c.norm_sq, &c.g_expanded, &mut out);
    ExpandedVector(out)
}

/// Expanded `2N × 2N` matrix of the projector's linear part; symmetric and
/// idempotent.
pub fn linear_part_matrix(c: &ConstraintVector) -> Mat<f64> {
    let n = c.g_expanded.len();
    let (g, ig) = (&c.g_expanded, &c.ig_expanded);
    Mat::from_fn(n, n, |r, s| {
        let id = if r == s { 1.0 } else { 0.0 };
        id - (g[r] * g[s] + ig[r] * ig[s]) / c.norm_sq
    })
}

/// Gradient of `f ∘ P`: the linear part applied to `∇f(P x)`.
pub fn projected_gradient(x: &ExpandedVector, c: &ConstraintVector, op: &MeasurementOperator) -> ExpandedVector {
    let y = project(x, c);
    let grad = QuadraticForms::at(&y, op).gradient();
    ExpandedVector(apply_linear_part(&grad, c))
}

/// `|<ψ, g> - 1|` for the complex vector behind `x`.
pub fn constraint_residual(x: &[f64], c: &ConstraintVector) -> f64 {
    let re = dot(x, &c.g_expanded);
    let im = dot(x, &c.ig_expanded);
    (re - 1.0).hypot(im)
}
