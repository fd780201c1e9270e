//! Forward scattering by a penetrable inhomogeneity in two dimensions.

mod directions;
mod grid;
mod hankel;
mod solver;

pub use directions::DirectionSet;
pub use grid::{rasterize_disc, Disc, Grid2D, RadialProfile, RefractionIndexField};
pub use hankel::{hankel_h0_asymptotic, hankel_h0_h1};
pub use solver::{
    far_field, gamma, green2d, incident_plane_wave, reference_field_at_point, self_cell_integral, solve_total_field,
    ForwardSolver, ReferenceFields, TotalFieldGrid, DEFAULT_RESIDUAL_TOL, GAMMA_3D,
};
