//! Step-length selection by dichotomy on the directional derivative.

use super::dense::dot;
use super::objective::QuadraticForms;
use crate::farfield::MeasurementOperator;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineSearchConfig {
    /// First trial step.
    pub initial_step: f64,
    /// Bracket growth factor while the derivative stays negative.
    pub growth: f64,
    pub max_growth_steps: usize,
    pub max_bisections: usize,
    /// Bisection stops once `(hi - lo) <= rel_width * hi`.
    pub rel_width: f64,
}

impl Default for LineSearchConfig {
    fn default() -> Self {
        Self {
            initial_step: 1.0,
            growth: 2.0,
            max_growth_steps: 60,
            max_bisections: 50,
            rel_width: 1e-3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum LineSearchError {
    #[error("direction is not a descent direction (derivative {0:.3e})")]
    NotDescent(f64),
    #[error("no step with strict decrease was found")]
    NoDecrease,
}

/// Returns a step `alpha > 0` with `phi(alpha) < phi(0)`.
///
/// `phi` returns the cost and its derivative along the search direction.
/// The bracket grows from `initial_step` until the derivative changes sign
/// (or the cost stops decreasing); the sign change is then located by
/// bisection. If the bracket never closes, the last decreasing trial step
/// is returned.
pub fn dichotomy_line_search(
    mut phi: impl FnMut(f64) -> (f64, f64),
    cfg: &LineSearchConfig,
) -> Result<f64, LineSearchError> {
    let (f0, d0) = phi(0.0);
    if !(d0 < 0.0) {
        return Err(LineSearchError::NotDescent(d0));
    }
    let decreasing = |f: f64, d: f64| f < f0 && d < 0.0;

    let mut lo = 0.0;
    let mut hi = None;
    let mut t = cfg.initial_step;
    for _ in 0..=cfg.max_growth_steps {
        let (ft, dt) = phi(t);
        if decreasing(ft, dt) {
            lo = t;
            t *= cfg.growth;
        } else {
            hi = Some(t);
            break;
        }
    }
    let Some(mut hi) = hi else {
        return Ok(lo);
    };

    for _ in 0..cfg.max_bisections {
        if hi - lo <= cfg.rel_width * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let (fm, dm) = phi(mid);
        if decreasing(fm, dm) {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    let mid = 0.5 * (lo + hi);
    if phi(mid).0 < f0 {
        return Ok(mid);
    }
    if lo > 0.0 {
        return Ok(lo);
    }
    // Still no decreasing point: keep halving toward zero.
    let mut t = hi;
    for _ in 0..cfg.max_growth_steps {
        t *= 0.5;
        if phi(t).0 < f0 {
            return Ok(t);
        }
    }
    Err(LineSearchError::NoDecrease)
}

/// The objective restricted to the line `x + t d`: both quadratic forms are
/// quadratics in `t`, so the cost is an exact quartic.
#[derive(Debug, Clone, Copy)]
pub struct LineCost {
    re: [f64; 3],
    im: [f64; 3],
}

impl LineCost {
    pub fn new(x: &[f64], d: &[f64], op: &MeasurementOperator) -> Self {
        let q = QuadraticForms::at(x, op);
        Self::from_forms(&q, d, op)
    }

    pub(crate) fn from_forms(q: &QuadraticForms, d: &[f64], op: &MeasurementOperator) -> Self {
        let qd = QuadraticForms::at(d, op);
        Self {
            re: [q.re, 2.0 * dot(d, &q.wr_x), qd.re],
            im: [q.im, 2.0 * dot(d, &q.wi_x), qd.im],
        }
    }

    /// Cost and derivative at `t`.
    pub fn eval(&self, t: f64) -> (f64, f64) {
        let r = self.re[0] + t * (self.re[1] + t * self.re[2]);
        let i = self.im[0] + t * (self.im[1] + t * self.im[2]);
        let dr = self.re[1] + 2.0 * t * self.re[2];
        let di = self.im[1] + 2.0 * t * self.im[2];
        (r * r + i * i, 2.0 * (r * dr + i * di))
    }
}
