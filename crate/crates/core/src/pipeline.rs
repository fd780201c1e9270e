//! End-to-end runs: synthetic data from two index fields, then the
//! indicator sweep.

use crate::criterion::OptimizerConfig;
use crate::error::Result;
use crate::farfield::{
    add_noise, measurement_operator_from_data, FarFieldMatrix, MeasurementOperator, QuadratureBasis,
};
use crate::sampling::{run_sweep_with_reference, IndicatorMap, SamplingGrid};
use crate::scattering::{DirectionSet, ForwardSolver, ReferenceFields, RefractionIndexField, DEFAULT_RESIDUAL_TOL};

/// Factorized solvers for the reference and perturbed media.
pub struct Media {
    pub k: f64,
    pub reference: ForwardSolver,
    /// `None` when the perturbed index equals the reference one.
    pub perturbed: Option<ForwardSolver>,
}

impl Media {
    pub fn new(n0: &RefractionIndexField, n1: &RefractionIndexField, k: f64) -> Result<Self> {
        let reference = ForwardSolver::new(n0, k)?;
        let perturbed = if n0 == n1 {
            None
        } else {
            Some(ForwardSolver::new(n1, k)?)
        };
        Ok(Self {
            k,
            reference,
            perturbed,
        })
    }

    /// Far-field data of both media in `directions`, plus the reference
    /// total fields needed by the sweep.
    pub fn synthesize(&self, directions: &DirectionSet) -> Result<SyntheticData> {
        let fields = self.reference.solve_directions(directions, DEFAULT_RESIDUAL_TOL)?;
        let f0 = FarFieldMatrix {
            directions: directions.clone(),
            k: self.k,
            entries: self.reference.far_field_matrix(&fields, directions),
        };
        let f1 = match &self.perturbed {
            Some(solver) => {
                let fields1 = solver.solve_directions(directions, DEFAULT_RESIDUAL_TOL)?;
                FarFieldMatrix {
                    directions: directions.clone(),
                    k: self.k,
                    entries: solver.far_field_matrix(&fields1, directions),
                }
            }
            None => f0.clone(),
        };
        Ok(SyntheticData {
            f0,
            f1,
            reference: self.reference.reference_fields(fields),
        })
    }

    /// Reference total fields only, for data read back from files.
    pub fn reference_fields(&self, directions: &DirectionSet) -> Result<ReferenceFields> {
        let fields = self.reference.solve_directions(directions, DEFAULT_RESIDUAL_TOL)?;
        Ok(self.reference.reference_fields(fields))
    }
}

pub struct SyntheticData {
    pub f0: FarFieldMatrix,
    pub f1: FarFieldMatrix,
    pub reference: ReferenceFields,
}

/// Relative noise applied to the perturbed-medium data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Noise {
    pub epsilon: f64,
    pub seed: u64,
}

pub struct Reconstruction {
    pub operator: MeasurementOperator,
    pub map: IndicatorMap,
}

/// Builds `W` from the two data sets (adding noise to `f1` if requested)
/// and sweeps `grid`.
pub fn reconstruct(
    f0: &FarFieldMatrix,
    f1: &FarFieldMatrix,
    reference: &ReferenceFields,
    noise: Option<Noise>,
    grid: &SamplingGrid,
    cfg: &OptimizerConfig,
) -> Result<Reconstruction> {
    let f1 = match noise {
        Some(n) => add_noise(f1, n.epsilon, n.seed)?,
        None => f1.clone(),
    };
    let operator = measurement_operator_from_data(f0, &f1)?;
    let basis = QuadratureBasis::from_directions(&f0.directions);
    let map = run_sweep_with_reference(&operator, reference, &basis, grid, cfg)?;
    Ok(Reconstruction { operator, map })
}
