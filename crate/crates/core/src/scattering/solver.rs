//! Midpoint collocation of the Lippmann–Schwinger equation
//!
//! ```text
//! u(x) = u_i(x) + k² ∫_D Φ(x, y) (n(y) - 1) u(y) dy,   Φ(x, y) = (i/4) H0(k|x - y|)
//! ```
//!
//! on the support cells of a [`RefractionIndexField`], solved densely.

use std::f64::consts::PI;

use faer::Mat;
use num_complex::Complex64;
use rayon::prelude::*;

use super::directions::DirectionSet;
use super::grid::{Grid2D, RefractionIndexField};
use super::hankel::{hankel0_unchecked, hankel_unchecked};
use crate::error::{Error, Result};

/// Relative residual accepted by default for a collocation solve.
pub const DEFAULT_RESIDUAL_TOL: f64 = 1e-8;

/// Reciprocal condition estimates below this are treated as singular.
const SINGULAR_RCOND: f64 = 1e-14;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Far-field normalization constant in two dimensions,
/// `exp(iπ/4) / sqrt(8πk)`.
pub fn gamma(k: f64) -> Complex64 {
    Complex64::from_polar(1.0, PI / 4.0) / (8.0 * PI * k).sqrt()
}

/// Far-field normalization constant in three dimensions, `1/(4π)`.
pub const GAMMA_3D: f64 = 1.0 / (4.0 * PI);

/// Outgoing 2D Green's function `(i/4) H0(k|x - y|)`.
pub fn green2d(k: f64, x: [f64; 2], y: [f64; 2]) -> Result<Complex64> {
    let r = (x[0] - y[0]).hypot(x[1] - y[1]);
    if r == 0.0 {
        return Err(Error::Domain("Green's function evaluated at coincident points".into()));
    }
    if !(k > 0.0) {
        return Err(Error::Domain(format!("wavenumber must be positive, got {k}")));
    }
    Ok(0.25 * I * hankel0_unchecked(k * r))
}

/// Plane wave `exp(ik θ·x)`.
pub fn incident_plane_wave(k: f64, theta: [f64; 2], x: [f64; 2]) -> Complex64 {
    Complex64::from_polar(1.0, k * (theta[0] * x[0] + theta[1] * x[1]))
}

/// `∫_{|y| < R} (i/4) H0(k|y|) dy` for the disc with the area of one cell.
pub fn self_cell_integral(k: f64, cell_area: f64) -> Complex64 {
    let radius = (cell_area / PI).sqrt();
    let (_, h1) = hankel_unchecked(k * radius);
    I * PI * radius * h1 / (2.0 * k) - 1.0 / (k * k)
}

/// Total field on the support cells for one plane-wave incidence. Values
/// follow the order of [`RefractionIndexField::support_cells`].
#[derive(Debug, Clone, PartialEq)]
pub struct TotalFieldGrid {
    pub grid: Grid2D,
    pub values: Vec<Complex64>,
    pub incidence: usize,
    pub direction: [f64; 2],
}

/// Factorized collocation system for one index field and wavenumber.
/// Solves for any number of incidences reuse the factorization.
pub struct ForwardSolver {
    k: f64,
    grid: Grid2D,
    cells: Vec<usize>,
    centers: Vec<[f64; 2]>,
    contrast: Vec<Complex64>,
    self_term: Complex64,
    /// Kernel `k² |cell| Φ` indexed by cell offset, see [`Self::offset`].
    offsets: Vec<Complex64>,
    /// Grid coordinates of the support cells.
    ij: Vec<(usize, usize)>,
    lu: Option<PackedLu>,
    rcond: f64,
}

impl ForwardSolver {
    pub fn new(index: &RefractionIndexField, k: f64) -> Result<Self> {
        if !(k > 0.0) || !k.is_finite() {
            return Err(Error::Domain(format!("wavenumber must be positive, got {k}")));
        }
        let grid = *index.grid();
        let cells = index.support_cells();
        let centers: Vec<_> = cells.iter().map(|&c| grid.center(c)).collect();
        let one = Complex64::new(1.0, 0.0);
        let contrast: Vec<_> = cells.iter().map(|&c| index.values()[c] - one).collect();
        let self_term = k * k * self_cell_integral(k, grid.cell_area());

        // The kernel only depends on the cell offset.
        let area = grid.cell_area();
        let (dx, dy) = grid.spacing;
        let offsets: Vec<Complex64> = (0..grid.len())
            .into_par_iter()
            .map(|o| {
                let (di, dj) = ((o % grid.nx) as f64, (o / grid.nx) as f64);
                if o == 0 {
                    self_term
                } else {
                    let r = (di * dx).hypot(dj * dy);
                    k * k * area * 0.25 * I * hankel0_unchecked(k * r)
                }
            })
            .collect();

        let m = cells.len();
        let ij: Vec<(usize, usize)> = cells.iter().map(|&c| (c % grid.nx, c / grid.nx)).collect();
        let offset = |a: usize, b: usize| ij[a].0.abs_diff(ij[b].0) + grid.nx * ij[a].1.abs_diff(ij[b].1);
        let mut system = Mat::from_fn(m, m, |a, b| {
            let diag = if a == b { one } else { Complex64::new(0.0, 0.0) };
            diag - offsets[offset(a, b)] * contrast[b]
        });

        let (lu, rcond) = if m == 0 {
            (None, 1.0)
        } else {
            let lu = PackedLu::factor(&mut system);
            let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
            for d in 0..m {
                let v = lu.lu[(d, d)].norm();
                lo = lo.min(v);
                hi = hi.max(v);
            }
            let rcond = if hi > 0.0 && lo.is_finite() { lo / hi } else { 0.0 };
            if !(rcond > SINGULAR_RCOND) {
                return Err(Error::Solver {
                    incidence: None,
                    message: "collocation matrix is numerically singular".into(),
                    condition: 1.0 / rcond,
                });
            }
            (Some(lu), rcond)
        };

        Ok(Self {
            k,
            grid,
            cells,
            centers,
            contrast,
            self_term,
            offsets,
            ij,
            lu,
            rcond,
        })
    }

    pub fn wavenumber(&self) -> f64 {
        self.k
    }

    pub fn unknowns(&self) -> usize {
        self.cells.len()
    }

    /// Pivot-ratio estimate of the condition number of the collocation matrix.
    pub fn condition_estimate(&self) -> f64 {
        1.0 / self.rcond
    }

    /// Solves for every direction of `directions` at once; each column
    /// must reach relative residual `tol`.
    pub fn solve_directions(&self, directions: &DirectionSet, tol: f64) -> Result<Vec<TotalFieldGrid>> {
        let dirs: Vec<[f64; 2]> = directions.directions().collect();
        self.solve_many(&dirs, tol)
    }

    pub fn solve(&self, theta: [f64; 2], tol: f64) -> Result<TotalFieldGrid> {
        let mut v = self.solve_many(&[theta], tol)?;
        Ok(v.pop().expect("one incidence"))
    }

    fn solve_many(&self, dirs: &[[f64; 2]], tol: f64) -> Result<Vec<TotalFieldGrid>> {
        for (j, t) in dirs.iter().enumerate() {
            if ((t[0] * t[0] + t[1] * t[1]).sqrt() - 1.0).abs() > 1e-12 {
                return Err(Error::Domain(format!("incidence {j} is not a unit vector")));
            }
        }
        let m = self.cells.len();
        let rhs = Mat::from_fn(m, dirs.len(), |a, j| {
            incident_plane_wave(self.k, dirs[j], self.centers[a])
        });
        let sol = match &self.lu {
            Some(lu) => lu.solve(rhs.clone()),
            None => rhs.clone(),
        };
        let residual = &self.apply(&sol) - &rhs;
        dirs.iter()
            .enumerate()
            .map(|(j, &direction)| {
                let values: Vec<Complex64> = sol.col_as_slice(j).to_vec();
                let r = residual.col(j).norm_l2();
                let b = rhs.col(j).norm_l2();
                let rel = if b > 0.0 { r / b } else { r };
                if !rel.is_finite() || rel > tol {
                    return Err(Error::Solver {
                        incidence: Some(j),
                        message: format!("relative residual {rel:.3e} exceeds {tol:.1e}"),
                        condition: self.condition_estimate(),
                    });
                }
                Ok(TotalFieldGrid {
                    grid: self.grid,
                    values,
                    incidence: j,
                    direction,
                })
            })
            .collect()
    }

    /// `(I - K diag(n - 1)) u` for every column of `u`, without storing the
    /// system matrix.
    fn apply(&self, u: &Mat<Complex64>) -> Mat<Complex64> {
        let m = self.cells.len();
        let nx = self.grid.nx;
        let cols = u.ncols();
        let weighted: Vec<Vec<Complex64>> = (0..m)
            .map(|b| (0..cols).map(|j| self.contrast[b] * u[(b, j)]).collect())
            .collect();
        let rows: Vec<Vec<Complex64>> = (0..m)
            .into_par_iter()
            .map(|a| {
                let (ia, ja) = self.ij[a];
                let mut acc = vec![Complex64::new(0.0, 0.0); cols];
                for (b, wb) in weighted.iter().enumerate() {
                    let (ib, jb) = self.ij[b];
                    let kernel = self.offsets[ia.abs_diff(ib) + nx * ja.abs_diff(jb)];
                    for (s, w) in acc.iter_mut().zip(wb) {
                        *s += kernel * w;
                    }
                }
                acc
            })
            .collect();
        Mat::from_fn(m, cols, |a, j| u[(a, j)] - rows[a][j])
    }

    /// Far-field pattern `k² ∫ exp(-ik x̂·y) (n - 1) u(y) dy` of `field`.
    pub fn far_field(&self, field: &TotalFieldGrid, xhat: [f64; 2]) -> Complex64 {
        let scale = self.k * self.k * self.grid.cell_area();
        let sum: Complex64 = self
            .centers
            .iter()
            .zip(&self.contrast)
            .zip(&field.values)
            .map(|((&y, &q), &u)| incident_plane_wave(self.k, [-xhat[0], -xhat[1]], y) * q * u)
            .sum();
        scale * sum
    }

    /// Far-field matrix with entry `(i, j)` the pattern in direction `i`
    /// for incidence `j`.
    pub fn far_field_matrix(&self, fields: &[TotalFieldGrid], directions: &DirectionSet) -> Mat<Complex64> {
        let n = directions.len();
        let m = self.cells.len();
        let scale = self.k * self.k * self.grid.cell_area();
        let dirs: Vec<_> = directions.directions().collect();
        let e = Mat::from_fn(n, m, |i, c| {
            scale * incident_plane_wave(self.k, [-dirs[i][0], -dirs[i][1]], self.centers[c]) * self.contrast[c]
        });
        let u = Mat::from_fn(m, fields.len(), |c, j| fields[j].values[c]);
        &e * &u
    }

    /// Bundles solved fields for evaluating the total field at arbitrary points.
    pub fn reference_fields(&self, fields: Vec<TotalFieldGrid>) -> ReferenceFields {
        ReferenceFields {
            k: self.k,
            grid: self.grid,
            cells: self.cells.clone(),
            centers: self.centers.clone(),
            contrast: self.contrast.clone(),
            self_term: self.self_term,
            directions: fields.iter().map(|f| f.direction).collect(),
            fields,
        }
    }
}

/// LU factors with partial pivoting stored in a single matrix.
struct PackedLu {
    lu: Mat<Complex64>,
    perm: faer::perm::Perm<usize>,
}

impl PackedLu {
    /// Factors `a` in place, taking its storage.
    fn factor(a: &mut Mat<Complex64>) -> Self {
        use faer::dyn_stack::{MemBuffer, MemStack};
        use faer::linalg::lu::partial_pivoting::factor::{lu_in_place, lu_in_place_scratch};

        let mut lu = std::mem::replace(a, Mat::new());
        let n = lu.nrows();
        let (mut fwd, mut bwd) = (vec![0usize; n], vec![0usize; n]);
        let par = faer::get_global_parallelism();
        let mut buf = MemBuffer::new(lu_in_place_scratch::<usize, Complex64>(n, n, par, Default::default()));
        lu_in_place(
            lu.as_mut(),
            &mut fwd,
            &mut bwd,
            par,
            MemStack::new(&mut buf),
            Default::default(),
        );
        let perm = faer::perm::Perm::new_checked(fwd.into_boxed_slice(), bwd.into_boxed_slice(), n);
        Self { lu, perm }
    }

    fn solve(&self, mut rhs: Mat<Complex64>) -> Mat<Complex64> {
        use faer::dyn_stack::{MemBuffer, MemStack};
        use faer::linalg::lu::partial_pivoting::solve::{solve_in_place_scratch, solve_in_place_with_conj};

        let n = self.lu.nrows();
        let par = faer::get_global_parallelism();
        let mut buf = MemBuffer::new(solve_in_place_scratch::<usize, Complex64>(n, rhs.ncols(), par));
        solve_in_place_with_conj(
            self.lu.as_ref(),
            self.lu.as_ref(),
            self.perm.as_ref(),
            faer::Conj::No,
            rhs.as_mut(),
            par,
            MemStack::new(&mut buf),
        );
        rhs
    }
}

/// Solved total fields for a set of incidences, evaluable anywhere in the
/// plane through the Lippmann–Schwinger representation.
#[derive(Debug, Clone)]
pub struct ReferenceFields {
    k: f64,
    grid: Grid2D,
    cells: Vec<usize>,
    centers: Vec<[f64; 2]>,
    contrast: Vec<Complex64>,
    self_term: Complex64,
    directions: Vec<[f64; 2]>,
    fields: Vec<TotalFieldGrid>,
}

impl ReferenceFields {
    pub fn len(&self) -> usize {
        self.fields.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }

    pub fn fields(&self) -> &[TotalFieldGrid] {
        &self.fields
    }

    /// Total field at `z` for every incidence.
    ///
    /// When `z` falls inside a support cell, that cell contributes its
    /// equal-area disc integral instead of the singular midpoint value.
    pub fn at_point(&self, z: [f64; 2]) -> Vec<Complex64> {
        let area = self.grid.cell_area();
        let host = self.grid.cell_containing(z);
        let weights: Vec<Complex64> = self
            .cells
            .iter()
            .zip(&self.centers)
            .zip(&self.contrast)
            .map(|((&c, &y), &q)| {
                let kernel = if Some(c) == host {
                    self.self_term
                } else {
                    let r = (z[0] - y[0]).hypot(z[1] - y[1]);
                    self.k * self.k * area * 0.25 * I * hankel0_unchecked(self.k * r)
                };
                kernel * q
            })
            .collect();
        self.fields
            .iter()
            .zip(&self.directions)
            .map(|(f, &theta)| {
                let scattered: Complex64 = weights.iter().zip(&f.values).map(|(w, u)| w * u).sum();
                incident_plane_wave(self.k, theta, z) + scattered
            })
            .collect()
    }
}

/// Solves the collocation system for a single incidence.
pub fn solve_total_field(index: &RefractionIndexField, k: f64, theta: [f64; 2], tol: f64) -> Result<TotalFieldGrid> {
    ForwardSolver::new(index, k)?.solve(theta, tol)
}

/// Far-field pattern of a solved field in direction `xhat`.
pub fn far_field(index: &RefractionIndexField, field: &TotalFieldGrid, k: f64, xhat: [f64; 2]) -> Complex64 {
    let grid = index.grid();
    let one = Complex64::new(1.0, 0.0);
    let sum: Complex64 = index
        .support_cells()
        .into_iter()
        .zip(&field.values)
        .map(|(c, &u)| {
            let y = grid.center(c);
            incident_plane_wave(k, [-xhat[0], -xhat[1]], y) * (index.values()[c] - one) * u
        })
        .sum();
    k * k * grid.cell_area() * sum
}

/// Reference total field `u(θ_j, z)` at a single point for every direction.
pub fn reference_field_at_point(
    index: &RefractionIndexField,
    k: f64,
    directions: &DirectionSet,
    z: [f64; 2],
) -> Result<Vec<Complex64>> {
    let solver = ForwardSolver::new(index, k)?;
    let fields = solver.solve_directions(directions, DEFAULT_RESIDUAL_TOL)?;
    Ok(solver.reference_fields(fields).at_point(z))
}
