use std::f64::consts::TAU;

use crate::error::{Error, Result};

/// Incidence and measurement directions on the unit circle together with
/// trapezoid quadrature weights.
///
/// A full aperture uses `N` equispaced angles on `[start, start + 2π)` with
/// equal weights `2π/N`. A limited aperture places `N` equispaced angles on
/// the closed arc `[start, end]` and halves the two endpoint weights.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionSet {
    angles: Vec<f64>,
    weights: Vec<f64>,
    aperture: (f64, f64),
}

impl DirectionSet {
    pub fn full(count: usize) -> Result<Self> {
        Self::with_aperture(count, 0.0, TAU)
    }

    /// Chooses full or limited aperture from the arc length.
    pub fn with_aperture(count: usize, start: f64, end: f64) -> Result<Self> {
        if count < 2 {
            return Err(Error::Config(format!("need at least 2 directions, got {count}")));
        }
        if !(end > start) || !start.is_finite() || !end.is_finite() {
            return Err(Error::Config(format!(
                "aperture end must exceed start, got [{start}, {end}]"
            )));
        }
        let arc = end - start;
        if arc > TAU + 1e-12 {
            return Err(Error::Config(format!(
                "aperture [{start}, {end}] exceeds the full circle"
            )));
        }
        let n = count as f64;
        let (angles, weights) = if Self::is_full_arc(arc) {
            (
                (0..count).map(|j| start + TAU * j as f64 / n).collect(),
                vec![TAU / n; count],
            )
        } else {
            let h = arc / (n - 1.0);
            let mut w = vec![h; count];
            w[0] = h / 2.0;
            w[count - 1] = h / 2.0;
            ((0..count).map(|j| start + h * j as f64).collect(), w)
        };
        Ok(Self {
            angles,
            weights,
            aperture: (start, end),
        })
    }

    fn is_full_arc(arc: f64) -> bool {
        (arc - TAU).abs() <= 1e-12
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    pub fn is_full_aperture(&self) -> bool {
        Self::is_full_arc(self.aperture.1 - self.aperture.0)
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn aperture(&self) -> (f64, f64) {
        self.aperture
    }

    pub fn direction(&self, j: usize) -> [f64; 2] {
        let (s, c) = self.angles[j].sin_cos();
        [c, s]
    }

    pub fn directions(&self) -> impl Iterator<Item = [f64; 2]> + '_ {
        (0..self.len()).map(|j| self.direction(j))
    }

    /// Index of the direction opposite to `j`, if it belongs to the set.
    pub fn antipode(&self, j: usize) -> Option<usize> {
        let [cx, cy] = self.direction(j);
        (0..self.len()).find(|&i| {
            let [dx, dy] = self.direction(i);
            (dx + cx).abs() < 1e-12 && (dy + cy).abs() < 1e-12
        })
    }
}
