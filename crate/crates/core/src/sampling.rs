//! Sweeps of the indicator over a rectangular grid of sampling points.

use rayon::prelude::*;

use crate::criterion::{minimize, ConstraintVector, OptimizerConfig};
use crate::error::{Error, Result};
use crate::farfield::{MeasurementOperator, QuadratureBasis};
use crate::scattering::{DirectionSet, ForwardSolver, ReferenceFields, RefractionIndexField, DEFAULT_RESIDUAL_TOL};

/// `log10` assigned to exact zeros.
pub const LOG10_FLOOR: f64 = -320.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplingGrid {
    /// `(xmin, xmax, ymin, ymax)`
    pub bounds: (f64, f64, f64, f64),
    /// Points per axis, endpoints included.
    pub resolution: (usize, usize),
}

impl SamplingGrid {
    pub fn new(bounds: (f64, f64, f64, f64), resolution: (usize, usize)) -> Result<Self> {
        let (x0, x1, y0, y1) = bounds;
        if resolution.0 == 0 || resolution.1 == 0 {
            return Err(Error::Config("sampling resolution must be positive".into()));
        }
        if ![x0, x1, y0, y1].iter().all(|v| v.is_finite()) || x1 < x0 || y1 < y0 {
            return Err(Error::Config(format!("invalid sampling bounds {bounds:?}")));
        }
        Ok(Self { bounds, resolution })
    }

    /// Square grid over `[-half, half]²`; 93 points per axis gives about
    /// 8600 points.
    pub fn square(half: f64, points: usize) -> Result<Self> {
        Self::new((-half, half, -half, half), (points, points))
    }

    pub fn len(&self) -> usize {
        self.resolution.0 * self.resolution.1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Point `idx`, with x varying fastest.
    pub fn point(&self, idx: usize) -> [f64; 2] {
        let (mx, my) = self.resolution;
        let (x0, x1, y0, y1) = self.bounds;
        let lin = |a: f64, b: f64, m: usize, i: usize| {
            if m == 1 {
                0.5 * (a + b)
            } else {
                a + (b - a) * i as f64 / (m - 1) as f64
            }
        };
        [lin(x0, x1, mx, idx % mx), lin(y0, y1, my, idx / mx)]
    }

    pub fn points(&self) -> Vec<[f64; 2]> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }
}

/// Outcome at one sampling point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointRecord {
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl PointRecord {
    fn failed() -> Self {
        Self {
            value: f64::INFINITY,
            iterations: 0,
            converged: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorMap {
    pub grid: SamplingGrid,
    pub values: Vec<f64>,
    pub log10_values: Vec<f64>,
    pub iterations: Vec<usize>,
    pub converged: Vec<bool>,
}

impl IndicatorMap {
    pub fn from_records(grid: SamplingGrid, records: &[PointRecord]) -> Result<Self> {
        if records.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                found: records.len(),
            });
        }
        Ok(Self {
            grid,
            values: records.iter().map(|r| r.value).collect(),
            log10_values: records.iter().map(|r| clamped_log10(r.value)).collect(),
            iterations: records.iter().map(|r| r.iterations).collect(),
            converged: records.iter().map(|r| r.converged).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

pub fn clamped_log10(v: f64) -> f64 {
    if v > 0.0 {
        v.log10().max(LOG10_FLOOR)
    } else {
        LOG10_FLOOR
    }
}

/// Solves the reference medium for every direction and sweeps `grid`.
pub fn run_sweep(
    op: &MeasurementOperator,
    index_n0: &RefractionIndexField,
    k: f64,
    directions: &DirectionSet,
    grid: &SamplingGrid,
    cfg: &OptimizerConfig,
) -> Result<IndicatorMap> {
    let solver = ForwardSolver::new(index_n0, k)?;
    let reference = solver.reference_fields(solver.solve_directions(directions, DEFAULT_RESIDUAL_TOL)?);
    let basis = QuadratureBasis::from_directions(directions);
    run_sweep_with_reference(op, &reference, &basis, grid, cfg)
}

pub fn run_sweep_with_reference(
    op: &MeasurementOperator,
    reference: &ReferenceFields,
    basis: &QuadratureBasis,
    grid: &SamplingGrid,
    cfg: &OptimizerConfig,
) -> Result<IndicatorMap> {
    let records = evaluate_points(op, reference, basis, &grid.points(), cfg)?;
    IndicatorMap::from_records(*grid, &records)
}

/// Evaluates the indicator at arbitrary points. Each record depends only on
/// its own point, so the output does not depend on order or scheduling.
pub fn evaluate_points(
    op: &MeasurementOperator,
    reference: &ReferenceFields,
    basis: &QuadratureBasis,
    points: &[[f64; 2]],
    cfg: &OptimizerConfig,
) -> Result<Vec<PointRecord>> {
    cfg.validate()?;
    if reference.len() != op.dim() || basis.len() != op.dim() {
        return Err(Error::DimensionMismatch {
            expected: op.dim(),
            found: reference.len().min(basis.len()),
        });
    }
    Ok(points
        .par_iter()
        .map(|&z| {
            let Ok(c) = ConstraintVector::from_reference_field(&reference.at_point(z), basis) else {
                return PointRecord::failed();
            };
            match minimize(&c, op, cfg) {
                Ok(r) => PointRecord {
                    value: r.value,
                    iterations: r.iterations,
                    converged: r.converged,
                },
                Err(_) => PointRecord::failed(),
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IterationStats {
    pub min: usize,
    /// Lower middle for an even number of points.
    pub median: usize,
    pub max: usize,
}

pub fn summarize(map: &IndicatorMap) -> Result<IterationStats> {
    let mut counts = map.iterations.clone();
    if counts.is_empty() {
        return Err(Error::EmptyMap);
    }
    counts.sort_unstable();
    Ok(IterationStats {
        min: counts[0],
        median: counts[(counts.len() - 1) / 2],
        max: counts[counts.len() - 1],
    })
}

/// Marks points with `log10_value >= threshold`.
pub fn classify(map: &IndicatorMap, threshold: f64) -> Vec<bool> {
    map.log10_values.iter().map(|&v| v >= threshold).collect()
}

/// Median of the values, the lower middle one for even lengths; `None` if
/// empty.
pub fn lower_median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    Some(v[(v.len() - 1) / 2])
}
