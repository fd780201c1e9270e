//! Run configuration: a flat TOML file whose keys override the built-in
//! `simple-disc` case.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use defectloc::cases::DiscCase;
use defectloc::criterion::{Method, OptimizerConfig};
use defectloc::io::read_index;
use defectloc::pipeline::Noise;
use defectloc::sampling::SamplingGrid;
use defectloc::scattering::{DirectionSet, Disc, RadialProfile, RefractionIndexField};
use defectloc::Error;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Only `simple-disc` is built in.
    pub case: String,
    pub wavenumber: f64,

    /// INDEX2D raster for the reference medium; overrides the support disc.
    pub index_n0: Option<PathBuf>,
    /// INDEX2D raster for the perturbed medium; overrides the defect disc.
    pub index_n1: Option<PathBuf>,
    pub field_cells: usize,
    pub support_center: [f64; 2],
    pub support_diameter: f64,
    pub n0_center: f64,
    pub n0_edge: f64,
    /// `false` makes the perturbed medium equal to the reference one.
    pub defect: bool,
    pub defect_center: [f64; 2],
    pub defect_diameter: f64,
    pub n1_center: f64,
    pub n1_edge: f64,

    pub directions: usize,
    pub aperture_start: f64,
    pub aperture_end: f64,

    /// Relative noise added to the perturbed-medium data before
    /// reconstruction.
    pub noise: f64,
    pub seed: u64,

    pub method: String,
    pub x_tol: f64,
    pub max_iter: usize,
    pub cost_tol: f64,

    /// `[xmin, xmax, ymin, ymax]`
    pub sampling_bounds: [f64; 4],
    pub sampling_points: [usize; 2],

    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        let case = DiscCase::simple_disc();
        let (x0, x1, y0, y1) = case.sampling.bounds;
        Self {
            case: "simple-disc".into(),
            wavenumber: case.k,
            index_n0: None,
            index_n1: None,
            field_cells: case.field_cells,
            support_center: case.support.center,
            support_diameter: case.support.diameter,
            n0_center: case.n0_profile.center,
            n0_edge: case.n0_profile.edge,
            defect: true,
            defect_center: case.defect.center,
            defect_diameter: case.defect.diameter,
            n1_center: case.n1_profile.center,
            n1_edge: case.n1_profile.edge,
            directions: case.directions,
            aperture_start: case.aperture.0,
            aperture_end: case.aperture.1,
            noise: 0.0,
            seed: 0,
            method: Method::GradientProjection.name().into(),
            x_tol: 1e-9,
            max_iter: 400,
            cost_tol: 1e-32,
            sampling_bounds: [x0, x1, y0, y1],
            sampling_points: [case.sampling.resolution.0, case.sampling.resolution.1],
            output_dir: PathBuf::from("."),
        }
    }
}

impl RunConfig {
    /// Reads `path`; relative paths inside it are taken relative to the
    /// file's directory.
    pub fn load(path: &Path) -> Result<Self, Error> {
        let text = std::fs::read_to_string(path)?;
        let mut cfg: Self =
            toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {}", path.display(), e.message())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [&mut cfg.index_n0, &mut cfg.index_n1].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        if cfg.output_dir.is_relative() {
            cfg.output_dir = base.join(&cfg.output_dir);
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), Error> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.case != "simple-disc" {
            return fail(format!("unknown case `{}`", self.case));
        }
        if !(self.wavenumber > 0.0) || !self.wavenumber.is_finite() {
            return fail(format!("wavenumber must be positive, got {}", self.wavenumber));
        }
        if self.directions < 2 {
            return fail(format!("at least 2 directions are required, got {}", self.directions));
        }
        if !(self.aperture_end > self.aperture_start) {
            return fail("aperture_end must exceed aperture_start".into());
        }
        if !(self.noise >= 0.0) {
            return fail(format!("noise must be non-negative, got {}", self.noise));
        }
        if self.field_cells == 0 || !(self.support_diameter > 0.0) || !(self.defect_diameter > 0.0) {
            return fail("field_cells, support_diameter and defect_diameter must be positive".into());
        }
        for p in [&self.index_n0, &self.index_n1].into_iter().flatten() {
            if !p.is_file() {
                return fail(format!("index file {} does not exist", p.display()));
            }
        }
        self.optimizer()?.validate()?;
        self.sampling()?;
        Ok(())
    }

    /// SHA-256 of the canonical serialization of the effective
    /// configuration, output location excluded.
    pub fn hash(&self) -> String {
        let unplaced = Self {
            output_dir: PathBuf::new(),
            ..self.clone()
        };
        let canonical = toml::to_string(&unplaced).expect("configuration serializes");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }

    pub fn support(&self) -> Disc {
        Disc {
            center: self.support_center,
            diameter: self.support_diameter,
        }
    }

    pub fn defect_disc(&self) -> Disc {
        Disc {
            center: self.defect_center,
            diameter: self.defect_diameter,
        }
    }

    fn disc_case(&self) -> DiscCase {
        DiscCase {
            k: self.wavenumber,
            field_cells: self.field_cells,
            support: self.support(),
            n0_profile: RadialProfile {
                center: self.n0_center,
                edge: self.n0_edge,
            },
            defect: self.defect_disc(),
            n1_profile: RadialProfile {
                center: self.n1_center,
                edge: self.n1_edge,
            },
            directions: self.directions,
            aperture: (self.aperture_start, self.aperture_end),
            sampling: SamplingGrid {
                bounds: (
                    self.sampling_bounds[0],
                    self.sampling_bounds[1],
                    self.sampling_bounds[2],
                    self.sampling_bounds[3],
                ),
                resolution: (self.sampling_points[0], self.sampling_points[1]),
            },
        }
    }

    pub fn n0(&self) -> Result<RefractionIndexField, Error> {
        match &self.index_n0 {
            Some(path) => read_index_file(path),
            None => self.disc_case().n0(),
        }
    }

    pub fn n1(&self) -> Result<RefractionIndexField, Error> {
        if let Some(path) = &self.index_n1 {
            return read_index_file(path);
        }
        let n0 = self.n0()?;
        if !self.defect {
            return Ok(n0);
        }
        let case = self.disc_case();
        Ok(n0.with_inclusion(&case.defect, &case.n1_profile))
    }

    pub fn direction_set(&self) -> Result<DirectionSet, Error> {
        DirectionSet::with_aperture(self.directions, self.aperture_start, self.aperture_end)
    }

    pub fn optimizer(&self) -> Result<OptimizerConfig, Error> {
        Ok(OptimizerConfig {
            method: self.method.parse()?,
            x_tol: self.x_tol,
            max_iter: self.max_iter,
            cost_tol: self.cost_tol,
            ..OptimizerConfig::default()
        })
    }

    pub fn sampling(&self) -> Result<SamplingGrid, Error> {
        let [x0, x1, y0, y1] = self.sampling_bounds;
        SamplingGrid::new((x0, x1, y0, y1), (self.sampling_points[0], self.sampling_points[1]))
    }

    pub fn noise(&self) -> Option<Noise> {
        (self.noise > 0.0).then_some(Noise {
            epsilon: self.noise,
            seed: self.seed,
        })
    }
}

fn read_index_file(path: &Path) -> Result<RefractionIndexField, Error> {
    let file = std::fs::File::open(path)?;
    read_index(std::io::BufReader::new(file))
}
