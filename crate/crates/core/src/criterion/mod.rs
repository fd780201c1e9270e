//! Evaluation of the indicator `M(z)⁴` as a constrained minimization of
//! `|<Wψ, ψ>|²` over the hyperplane `<ψ, g_z> = 1`.
//!
//! Complex vectors `ψ ∈ C^N` are handled in the expanded real form
//! `x = (Re ψ; Im ψ) ∈ R^{2N}`.

mod dense;
mod line_search;
mod minimize;
mod objective;
mod projection;

use std::ops::Deref;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::farfield::QuadratureBasis;

pub use line_search::{dichotomy_line_search, LineCost, LineSearchConfig, LineSearchError};
pub use minimize::{
    minimize, minimize_observed, Iterate, Method, MinimizationResult, OptimizerConfig, StepRule, StopReason,
};
pub use objective::{gradient_fw4, hessian_fw4, objective_fw4};
pub use projection::{apply_linear_part, constraint_residual, linear_part_matrix, project, projected_gradient};

/// Constraint vectors with a smaller squared norm are rejected.
const MIN_CONSTRAINT_NORM_SQ: f64 = 1e-30;

/// A complex vector stored as `(Re ψ; Im ψ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpandedVector(pub Vec<f64>);

impl ExpandedVector {
    /// The zero vector for `n` complex components.
    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; 2 * n])
    }

    pub fn from_complex(psi: &[Complex64]) -> Self {
        let mut v: Vec<f64> = psi.iter().map(|z| z.re).collect();
        v.extend(psi.iter().map(|z| z.im));
        Self(v)
    }

    pub fn to_complex(&self) -> Vec<Complex64> {
        let n = self.0.len() / 2;
        (0..n).map(|j| Complex64::new(self.0[j], self.0[n + j])).collect()
    }
}

impl Deref for ExpandedVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// The constraint `<ψ, g> = 1` with precomputed expanded forms of `g` and
/// `i g`.
#[derive(Debug, Clone)]
pub struct ConstraintVector {
    pub g: Vec<Complex64>,
    pub norm_sq: f64,
    /// `(Re g; Im g)`
    pub g_expanded: Vec<f64>,
    /// `(-Im g; Re g)`
    pub ig_expanded: Vec<f64>,
}

impl ConstraintVector {
    pub fn new(g: Vec<Complex64>) -> Result<Self> {
        let norm_sq: f64 = g.iter().map(|z| z.norm_sqr()).sum();
        if !(norm_sq > MIN_CONSTRAINT_NORM_SQ) || !norm_sq.is_finite() {
            return Err(Error::DegenerateConstraint(norm_sq));
        }
        let g_expanded = ExpandedVector::from_complex(&g).0;
        let ig: Vec<Complex64> = g.iter().map(|z| Complex64::i() * z).collect();
        let ig_expanded = ExpandedVector::from_complex(&ig).0;
        Ok(Self {
            g,
            norm_sq,
            g_expanded,
            ig_expanded,
        })
    }

    /// `g_j = sqrt(w_j) conj(u(θ_j, z))` for reference total-field samples
    /// at one sampling point.
    pub fn from_reference_field(u: &[Complex64], basis: &QuadratureBasis) -> Result<Self> {
        if u.len() != basis.len() {
            return Err(Error::DimensionMismatch {
                expected: basis.len(),
                found: u.len(),
            });
        }
        Self::new(u.iter().zip(&basis.sqrt_weights).map(|(v, s)| v.conj() * *s).collect())
    }

    /// Number of complex components.
    pub fn dim(&self) -> usize {
        self.g.len()
    }
}
