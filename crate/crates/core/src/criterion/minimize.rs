use faer::prelude::*;
use faer::Mat;

use super::dense::{axpy, distance, dot, norm};
use super::line_search::{dichotomy_line_search, LineCost, LineSearchConfig};
use super::objective::{hessian_from_forms, QuadraticForms};
use super::projection::{apply_linear_part, constraint_residual, project};
use super::{ConstraintVector, ExpandedVector};
use crate::error::{Error, Result};
use crate::farfield::MeasurementOperator;

/// Below this gradient norm the iteration stops at the current point.
const ZERO_GRADIENT: f64 = 1e-300;

/// Safeguard halvings when a projected step fails to decrease the cost.
const MAX_BACKTRACKS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Unconstrained steepest descent on `f ∘ P`.
    SteepestDescent,
    /// Descent step on `f` followed by projection onto the constraint.
    GradientProjection,
    /// Newton steps with the projected Hessian, falling back to the
    /// projected gradient when the Newton direction is not a descent one.
    ProjectedNewton,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::SteepestDescent => "steepest_descent",
            Method::GradientProjection => "gradient_projection",
            Method::ProjectedNewton => "projected_newton",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "steepest_descent" => Ok(Method::SteepestDescent),
            "gradient_projection" => Ok(Method::GradientProjection),
            "projected_newton" => Ok(Method::ProjectedNewton),
            other => Err(Error::Config(format!("unknown method `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepRule {
    Dichotomy(LineSearchConfig),
    /// Fixed step length, no line search.
    Constant(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerConfig {
    pub method: Method,
    /// Stop when `‖x_{n+1} - x_n‖ / (1 + ‖x_n‖) < x_tol`.
    pub x_tol: f64,
    pub max_iter: usize,
    /// Stop when the relative cost change falls below this. The default is
    /// small enough never to trigger: cost values are tiny and a cost-based
    /// rule stops far from the infimum.
    pub cost_tol: f64,
    pub step: StepRule,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            method: Method::GradientProjection,
            x_tol: 1e-9,
            max_iter: 400,
            cost_tol: 1e-32,
            step: StepRule::Dichotomy(LineSearchConfig::default()),
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.x_tol > 0.0) {
            return Err(Error::Config(format!("x_tol must be positive, got {}", self.x_tol)));
        }
        if self.max_iter < 1 {
            return Err(Error::Config("max_iter must be at least 1".into()));
        }
        if !(self.cost_tol >= 0.0) {
            return Err(Error::Config(format!(
                "cost_tol must be non-negative, got {}",
                self.cost_tol
            )));
        }
        match self.step {
            StepRule::Constant(a) if !(a > 0.0) => {
                Err(Error::Config(format!("constant step must be positive, got {a}")))
            }
            StepRule::Dichotomy(ls) if !(ls.initial_step > 0.0 && ls.growth > 1.0 && ls.rel_width > 0.0) => {
                Err(Error::Config("invalid line search parameters".into()))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    StepTolerance,
    CostTolerance,
    ZeroGradient,
    /// The line search found no strictly decreasing step.
    NoDecrease,
    MaxIterations,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinimizationResult {
    /// Final cost, the approximation of `M(z)⁴`.
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
    pub stop_reason: StopReason,
    pub final_step: f64,
    pub constraint_residual: f64,
    /// Final point on the constraint hyperplane.
    pub point: ExpandedVector,
}

/// State handed to an observer after every accepted update.
pub struct Iterate<'a> {
    pub iteration: usize,
    /// The iterate itself (for steepest descent, the unprojected variable).
    pub x: &'a [f64],
    /// Cost at the iterate (after projection for steepest descent).
    pub cost: f64,
}

/// Approximates `inf { f(ψ) : <ψ, g> = 1 }` from `x0 = P(0)`.
pub fn minimize(c: &ConstraintVector, op: &MeasurementOperator, cfg: &OptimizerConfig) -> Result<MinimizationResult> {
    minimize_observed(c, op, cfg, |_| {})
}

pub fn minimize_observed(
    c: &ConstraintVector,
    op: &MeasurementOperator,
    cfg: &OptimizerConfig,
    mut observe: impl FnMut(&Iterate<'_>),
) -> Result<MinimizationResult> {
    cfg.validate()?;
    if c.dim() != op.dim() {
        return Err(Error::DimensionMismatch {
            expected: op.dim(),
            found: c.dim(),
        });
    }
    let mut x = project(&ExpandedVector::zeros(c.dim()), c).0;
    // Point where the cost is evaluated: P x for steepest descent, x otherwise.
    let mut y = x.clone();
    let mut forms = QuadraticForms::at(&y, op);
    let mut cost = forms.value();
    let mut last_step = 0.0;
    let mut iterations = 0;
    let mut reason = StopReason::MaxIterations;

    while iterations < cfg.max_iter {
        iterations += 1;
        let grad = forms.gradient();
        let projected = apply_linear_part(&grad, c);

        let direction: Vec<f64> = match cfg.method {
            Method::SteepestDescent => projected.iter().map(|g| -g).collect(),
            Method::GradientProjection => grad.iter().map(|g| -g).collect(),
            Method::ProjectedNewton => newton_direction(&forms, &projected, c, op),
        };
        let reference = if cfg.method == Method::GradientProjection {
            &grad
        } else {
            &projected
        };
        if norm(reference) <= ZERO_GRADIENT {
            reason = StopReason::ZeroGradient;
            break;
        }

        let alpha = match cfg.step {
            StepRule::Constant(a) => a,
            StepRule::Dichotomy(ls) => {
                let line = LineCost::from_forms(&forms, &direction, op);
                match dichotomy_line_search(|t| line.eval(t), &ls) {
                    Ok(a) => a,
                    Err(_) => {
                        reason = StopReason::NoDecrease;
                        break;
                    }
                }
            }
        };

        let (x_new, y_new, forms_new, alpha) = match cfg.method {
            Method::SteepestDescent => {
                let mut x_new = x.clone();
                axpy(alpha, &direction, &mut x_new);
                let y_new = project(&ExpandedVector(x_new.clone()), c).0;
                let f = QuadraticForms::at(&y_new, op);
                // The line search is exact on the quartic, but the recomputed
                // cost can still land an ulp above the current one.
                if matches!(cfg.step, StepRule::Dichotomy(_)) && f.value() > cost {
                    reason = StopReason::NoDecrease;
                    break;
                }
                (x_new, y_new, f, alpha)
            }
            _ => {
                let constant = matches!(cfg.step, StepRule::Constant(_));
                match projected_update(&x, &direction, alpha, cost, constant, c, op) {
                    Some((x_new, f, a)) => (x_new.clone(), x_new, f, a),
                    None => {
                        reason = StopReason::NoDecrease;
                        break;
                    }
                }
            }
        };

        let change = distance(&x_new, &x) / (1.0 + norm(&x));
        let new_cost = forms_new.value();
        let cost_change = (cost - new_cost).abs() / cost.abs().max(f64::MIN_POSITIVE);
        x = x_new;
        y = y_new;
        forms = forms_new;
        cost = new_cost;
        last_step = alpha;
        observe(&Iterate {
            iteration: iterations,
            x: &x,
            cost,
        });
        if change < cfg.x_tol {
            reason = StopReason::StepTolerance;
            break;
        }
        if cost_change < cfg.cost_tol {
            reason = StopReason::CostTolerance;
            break;
        }
    }

    Ok(MinimizationResult {
        value: cost,
        iterations,
        converged: reason != StopReason::MaxIterations,
        stop_reason: reason,
        final_step: last_step,
        constraint_residual: constraint_residual(&y, c),
        point: ExpandedVector(y),
    })
}

/// `P(x + alpha d)`, halving `alpha` while the projected point fails to
/// decrease the cost (only with a line search).
fn projected_update(
    x: &[f64],
    d: &[f64],
    mut alpha: f64,
    cost: f64,
    constant_step: bool,
    c: &ConstraintVector,
    op: &MeasurementOperator,
) -> Option<(Vec<f64>, QuadraticForms, f64)> {
    for _ in 0..=MAX_BACKTRACKS {
        let mut trial = x.to_vec();
        axpy(alpha, d, &mut trial);
        let trial = project(&ExpandedVector(trial), c).0;
        let f = QuadraticForms::at(&trial, op);
        if constant_step || f.value() < cost {
            return Some((trial, f, alpha));
        }
        alpha *= 0.5;
    }
    None
}

/// Solves `(P H P + (I - P)) d = -P ∇f` and keeps the result only if it is a
/// descent direction.
fn newton_direction(
    forms: &QuadraticForms,
    projected: &[f64],
    c: &ConstraintVector,
    op: &MeasurementOperator,
) -> Vec<f64> {
    let fallback = || projected.iter().map(|g| -g).collect::<Vec<_>>();
    let n = projected.len();
    let hessian = hessian_from_forms(forms, op);
    // Columns of H P, then P (H P) with the complement added back.
    let mut hp = Mat::<f64>::zeros(n, n);
    for r in 0..n {
        let row: Vec<f64> = (0..n).map(|s| hessian[(r, s)]).collect();
        let projected_row = apply_linear_part(&row, c);
        for s in 0..n {
            hp[(r, s)] = projected_row[s];
        }
    }
    let mut system = Mat::<f64>::zeros(n, n);
    for s in 0..n {
        let col: Vec<f64> = (0..n).map(|r| hp[(r, s)]).collect();
        let projected_col = apply_linear_part(&col, c);
        for r in 0..n {
            system[(r, s)] = projected_col[r];
        }
    }
    let (g, ig) = (&c.g_expanded, &c.ig_expanded);
    for r in 0..n {
        for s in 0..n {
            system[(r, s)] += (g[r] * g[s] + ig[r] * ig[s]) / c.norm_sq;
        }
    }
    let rhs = Mat::from_fn(n, 1, |r, _| -projected[r]);
    let sol = system.partial_piv_lu().solve(&rhs);
    let d: Vec<f64> = (0..n).map(|r| sol[(r, 0)]).collect();
    if d.iter().any(|v| !v.is_finite()) {
        return fallback();
    }
    let d = apply_linear_part(&d, c);
    if dot(&d, projected) < 0.0 {
        d
    } else {
        fallback()
    }
}
