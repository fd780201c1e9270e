use num_complex::Complex64;

use crate::error::{Error, Result};

/// Uniform Cartesian grid of rectangular cells. Cell `(i, j)` has its
/// center at `(x0 + (i + 1/2) dx, y0 + (j + 1/2) dy)`; cells are stored
/// row-major with `i` running fastest.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid2D {
    pub nx: usize,
    pub ny: usize,
    pub origin: (f64, f64),
    pub spacing: (f64, f64),
}

impl Grid2D {
    pub fn new(nx: usize, ny: usize, origin: (f64, f64), spacing: (f64, f64)) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(Error::Config(format!("grid needs at least one cell, got {nx}x{ny}")));
        }
        if !(spacing.0 > 0.0 && spacing.1 > 0.0) || !spacing.0.is_finite() || !spacing.1.is_finite() {
            return Err(Error::Config(format!("grid spacing must be positive, got {spacing:?}")));
        }
        if !origin.0.is_finite() || !origin.1.is_finite() {
            return Err(Error::Config("grid origin must be finite".into()));
        }
        Ok(Self {
            nx,
            ny,
            origin,
            spacing,
        })
    }

    /// Square grid of `cells` × `cells` covering `[-half_width, half_width]²`.
    pub fn centered_square(cells: usize, half_width: f64) -> Result<Self> {
        let h = 2.0 * half_width / cells as f64;
        Self::new(cells, cells, (-half_width, -half_width), (h, h))
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_area(&self) -> f64 {
        self.spacing.0 * self.spacing.1
    }

    pub fn center(&self, cell: usize) -> [f64; 2] {
        let i = cell % self.nx;
        let j = cell / self.nx;
        [
            self.origin.0 + (i as f64 + 0.5) * self.spacing.0,
            self.origin.1 + (j as f64 + 0.5) * self.spacing.1,
        ]
    }

    /// Index of the cell containing `p`, if any.
    pub fn cell_containing(&self, p: [f64; 2]) -> Option<usize> {
        let fi = (p[0] - self.origin.0) / self.spacing.0;
        let fj = (p[1] - self.origin.1) / self.spacing.1;
        if fi < 0.0 || fj < 0.0 {
            return None;
        }
        let (i, j) = (fi.floor() as usize, fj.floor() as usize);
        (i < self.nx && j < self.ny).then_some(j * self.nx + i)
    }
}

/// Piecewise-constant refraction index on a [`Grid2D`]. The support mask is
/// derived from the values: a cell belongs to the support exactly when its
/// index differs from 1.
#[derive(Debug, Clone, PartialEq)]
pub struct RefractionIndexField {
    grid: Grid2D,
    values: Vec<Complex64>,
    support_mask: Vec<bool>,
}

impl RefractionIndexField {
    pub fn new(grid: Grid2D, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                found: values.len(),
            });
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Config("refraction index must be finite".into()));
        }
        let support_mask = values.iter().map(|&v| v != Complex64::new(1.0, 0.0)).collect();
        Ok(Self {
            grid,
            values,
            support_mask,
        })
    }

    /// Samples `f` at every cell center.
    pub fn from_fn(grid: Grid2D, f: impl Fn([f64; 2]) -> Complex64) -> Self {
        let values = (0..grid.len()).map(|c| f(grid.center(c))).collect();
        Self::new(grid, values).expect("sampled index has the grid's length")
    }

    /// Index identically equal to 1 (no scatterer).
    pub fn homogeneous(grid: Grid2D) -> Self {
        Self::from_fn(grid, |_| Complex64::new(1.0, 0.0))
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn support_mask(&self) -> &[bool] {
        &self.support_mask
    }

    pub fn support_cells(&self) -> Vec<usize> {
        (0..self.values.len()).filter(|&c| self.support_mask[c]).collect()
    }

    pub fn is_real(&self) -> bool {
        self.values.iter().all(|v| v.im == 0.0)
    }

    /// Returns a copy with `contrast = n - 1` multiplied by `factor`.
    pub fn scale_contrast(&self, factor: f64) -> Self {
        let one = Complex64::new(1.0, 0.0);
        let values = self.values.iter().map(|&v| one + (v - one) * factor).collect();
        Self::new(self.grid, values).expect("same grid")
    }

    /// Replaces the values at cell centers inside `disc` by `profile`.
    pub fn with_inclusion(&self, disc: &Disc, profile: &RadialProfile) -> Self {
        let values = (0..self.grid.len())
            .map(|c| {
                let p = self.grid.center(c);
                if disc.contains(p) {
                    Complex64::new(profile.at(disc.relative_radius(p)), 0.0)
                } else {
                    self.values[c]
                }
            })
            .collect();
        Self::new(self.grid, values).expect("same grid")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Disc {
    pub center: [f64; 2],
    pub diameter: f64,
}

impl Disc {
    pub fn radius(&self) -> f64 {
        self.diameter / 2.0
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        let dx = p[0] - self.center[0];
        let dy = p[1] - self.center[1];
        dx * dx + dy * dy < self.radius() * self.radius()
    }

    /// Distance to the center divided by the radius.
    pub fn relative_radius(&self, p: [f64; 2]) -> f64 {
        (p[0] - self.center[0]).hypot(p[1] - self.center[1]) / self.radius()
    }
}

/// Value varying affinely with the relative radius: `center` at the
/// middle of a disc, `edge` on its boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialProfile {
    pub center: f64,
    pub edge: f64,
}

impl RadialProfile {
    pub fn constant(value: f64) -> Self {
        Self {
            center: value,
            edge: value,
        }
    }

    pub fn at(&self, relative_radius: f64) -> f64 {
        self.center + (self.edge - self.center) * relative_radius
    }
}

/// Rasterizes a disc with a radial profile on `grid`; the index is 1 outside.
pub fn rasterize_disc(grid: Grid2D, disc: &Disc, profile: &RadialProfile) -> RefractionIndexField {
    RefractionIndexField::homogeneous(grid).with_inclusion(disc, profile)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_grids() {
        assert!(Grid2D::new(0, 3, (0.0, 0.0), (1.0, 1.0)).is_err());
        assert!(Grid2D::new(3, 3, (0.0, 0.0), (0.0, 1.0)).is_err());
        assert!(Grid2D::new(3, 3, (0.0, 0.0), (1.0, -1.0)).is_err());
    }

    #[test]
    fn cell_centers_are_row_major() {
        let g = Grid2D::new(3, 2, (1.0, -1.0), (0.5, 2.0)).unwrap();
        assert_eq!(g.center(0), [1.25, 0.0]);
        assert_eq!(g.center(2), [2.25, 0.0]);
        assert_eq!(g.center(3), [1.25, 2.0]);
        assert_eq!(g.cell_containing([2.3, 1.5]), Some(5));
        assert_eq!(g.cell_containing([0.9, 0.0]), None);
        assert_eq!(g.cell_containing([2.6, 0.0]), None);
    }

    #[test]
    fn support_mask_follows_values() {
        let grid = Grid2D::centered_square(20, 1.0).unwrap();
        let disc = Disc {
            center: [0.0, 0.0],
            diameter: 1.0,
        };
        let n = rasterize_disc(grid, &disc, &RadialProfile { center: 2.0, edge: 1.5 });
        for (c, &inside) in n.support_mask().iter().enumerate() {
            assert_eq!(inside, disc.contains(grid.center(c)));
            if !inside {
                assert_eq!(n.values()[c], Complex64::new(1.0, 0.0));
            }
        }
        assert!(n.is_real());
        assert!(!n.support_cells().is_empty());
    }

    #[test]
    fn radial_profile_is_affine() {
        let p = RadialProfile {
            center: 1.84,
            edge: 1.56,
        };
        assert_eq!(p.at(0.0), 1.84);
        assert!((p.at(1.0) - 1.56).abs() < 1e-15);
        assert!((p.at(0.5) - 1.70).abs() < 1e-15);
    }
}
