//! Built-in synthetic configurations.

use std::f64::consts::PI;

use crate::error::Result;
use crate::sampling::SamplingGrid;
use crate::scattering::{rasterize_disc, DirectionSet, Disc, Grid2D, RadialProfile, RefractionIndexField};

/// A known disc-shaped medium with a disc-shaped defect.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscCase {
    pub k: f64,
    /// Cells per axis of the square field grid enclosing the support.
    pub field_cells: usize,
    pub support: Disc,
    pub n0_profile: RadialProfile,
    pub defect: Disc,
    /// Index of the perturbed medium on the defect.
    pub n1_profile: RadialProfile,
    pub directions: usize,
    pub aperture: (f64, f64),
    pub sampling: SamplingGrid,
}

impl DiscCase {
    /// `k = 10`, support of diameter 2.1 with index decreasing from 1.84 at
    /// the center to 1.56 at the rim, defect of diameter 0.6 centered at
    /// `(0.5, 0)` with index 2.16 to 2.01, 99 directions on the full circle.
    pub fn simple_disc() -> Self {
        Self {
            k: 10.0,
            field_cells: 60,
            support: Disc {
                center: [0.0, 0.0],
                diameter: 2.1,
            },
            n0_profile: RadialProfile {
                center: 1.84,
                edge: 1.56,
            },
            defect: Disc {
                center: [0.5, 0.0],
                diameter: 0.6,
            },
            n1_profile: RadialProfile {
                center: 2.16,
                edge: 2.01,
            },
            directions: 99,
            aperture: (0.0, 2.0 * PI),
            sampling: SamplingGrid {
                bounds: (-1.2, 1.2, -1.2, 1.2),
                resolution: (60, 60),
            },
        }
    }

    pub fn field_grid(&self) -> Result<Grid2D> {
        let half = 0.5 * self.support.diameter;
        Grid2D::new(
            self.field_cells,
            self.field_cells,
            (self.support.center[0] - half, self.support.center[1] - half),
            (
                self.support.diameter / self.field_cells as f64,
                self.support.diameter / self.field_cells as f64,
            ),
        )
    }

    pub fn n0(&self) -> Result<RefractionIndexField> {
        Ok(rasterize_disc(self.field_grid()?, &self.support, &self.n0_profile))
    }

    pub fn n1(&self) -> Result<RefractionIndexField> {
        Ok(self.n0()?.with_inclusion(&self.defect, &self.n1_profile))
    }

    pub fn direction_set(&self) -> Result<DirectionSet> {
        DirectionSet::with_aperture(self.directions, self.aperture.0, self.aperture.1)
    }
}
