//! Declarative experiment configuration.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::geom::Point;
use crate::walk::LatticeKind;

/// Version of the configuration schema accepted by this build.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    TotalWindingScaling,
    PointwiseIndex,
    Belisle,
    Werner,
    Spitzer,
    ExcursionCensus,
    DehnRnd,
    DehnAvg,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::TotalWindingScaling => "total_winding_scaling",
            ExperimentKind::PointwiseIndex => "pointwise_index",
            ExperimentKind::Belisle => "belisle",
            ExperimentKind::Werner => "werner",
            ExperimentKind::Spitzer => "spitzer",
            ExperimentKind::ExcursionCensus => "excursion_census",
            ExperimentKind::DehnRnd => "dehn_rnd",
            ExperimentKind::DehnAvg => "dehn_avg",
        }
    }

    /// Whether `z_points` are in lattice units (otherwise the rescaled plane).
    pub fn lattice_units(self) -> bool {
        matches!(
            self,
            ExperimentKind::Belisle | ExperimentKind::ExcursionCensus
        )
    }

    fn uses_walks(self) -> bool {
        !matches!(self, ExperimentKind::Werner | ExperimentKind::Spitzer)
    }
}

fn default_lattice() -> LatticeKind {
    LatticeKind::Square
}
fn default_c0() -> f64 {
    1.0
}
fn default_workers() -> usize {
    1
}
fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}
fn default_levels() -> Vec<i64> {
    (5..=10).collect()
}
fn default_d() -> usize {
    2
}

/// One experiment. Unknown keys are rejected.
///
/// `n_values` doubles as the list of path resolutions for the Brownian
/// experiments when `bm_resolution` is absent. `z_points` are in lattice
/// units for `belisle` and `excursion_census`, and in the rescaled plane
/// (walk divided by `sqrt(kappa n)`) otherwise.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub experiment: ExperimentKind,
    #[serde(default = "default_lattice")]
    pub lattice: LatticeKind,
    #[serde(default)]
    pub n_values: Vec<usize>,
    pub samples: usize,
    #[serde(default)]
    pub z_points: Vec<[f64; 2]>,
    #[serde(default = "default_c0")]
    pub c0: f64,
    #[serde(default)]
    pub bm_resolution: Option<usize>,
    #[serde(default)]
    pub epsilon: Vec<f64>,
    /// Winding levels for `werner`.
    #[serde(default = "default_levels")]
    pub levels: Vec<i64>,
    /// Dimension for `dehn_rnd`.
    #[serde(default = "default_d")]
    pub d: usize,
    /// Points per path for `werner`: rows and points per row.
    #[serde(default)]
    pub werner_grid: Option<[usize; 2]>,
    pub seed: u64,
    #[serde(default = "default_workers")]
    pub workers: usize,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let c: ExperimentConfig = serde_json::from_str(text).map_err(|e| Error::Config {
            field: "<json>".into(),
            reason: e.to_string(),
        })?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn z(&self) -> Vec<Point<f64>> {
        self.z_points
            .iter()
            .map(|p| Point::new(p[0], p[1]))
            .collect()
    }

    /// Hex SHA-256 of the settings that determine the results (everything
    /// except `workers` and `output_dir`).
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.workers = 1;
        c.output_dir = PathBuf::new();
        let bytes = serde_json::to_vec(&c).expect("config serializes");
        Sha256::digest(&bytes)
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        use ExperimentKind::*;
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::config(
                "schema_version",
                format!("expected {SCHEMA_VERSION}, found {}", self.schema_version),
            ));
        }
        if self.samples == 0 {
            return Err(Error::config("samples", "must be at least 1"));
        }
        if self.workers == 0 {
            return Err(Error::config("workers", "must be at least 1"));
        }
        if !(self.c0 > 0.0 && self.c0.is_finite()) {
            return Err(Error::config("c0", "must be positive"));
        }
        let kind = self.experiment;
        if kind.uses_walks() {
            if self.n_values.is_empty() {
                return Err(Error::config("n_values", "must not be empty"));
            }
            if self.n_values.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::config("n_values", "must be strictly increasing"));
            }
        }
        let min_n = match kind {
            ExcursionCensus | PointwiseIndex | Belisle => 2,
            DehnAvg => 0,
            _ => 1,
        };
        if self.n_values.iter().any(|&n| n < min_n) {
            return Err(Error::config(
                "n_values",
                format!("entries must be at least {min_n}"),
            ));
        }
        if kind == DehnAvg && self.n_values.iter().any(|n| n % 2 == 1) {
            return Err(Error::config("n_values", "closed walks need even n"));
        }
        if matches!(kind, DehnRnd | DehnAvg) && self.lattice != LatticeKind::Square {
            return Err(Error::config("lattice", "Dehn experiments use Z^d"));
        }
        if kind == DehnRnd && self.d < 2 {
            return Err(Error::config("d", "must be at least 2"));
        }
        if kind == DehnAvg && self.d != 2 {
            return Err(Error::config("d", "averaged bounds are for Z^2"));
        }
        if matches!(kind, PointwiseIndex | Belisle | ExcursionCensus | Spitzer)
            && self.z_points.is_empty()
        {
            return Err(Error::config("z_points", "at least one point is required"));
        }
        for (i, z) in self.z_points.iter().enumerate() {
            if !(z[0].is_finite() && z[1].is_finite()) {
                return Err(Error::config(
                    "z_points",
                    format!("point {i} is not finite"),
                ));
            }
            if kind.lattice_units() && on_lattice_line(self.lattice, Point::new(z[0], z[1])) {
                return Err(Error::config(
                    "z_points",
                    format!("point {i} lies on a lattice line"),
                ));
            }
        }
        if matches!(kind, Werner | Spitzer) {
            match self.bm_resolution {
                Some(m) if m >= 1 => {}
                _ => return Err(Error::config("bm_resolution", "required and at least 1")),
            }
        }
        if kind == Spitzer {
            if self.epsilon.is_empty() {
                return Err(Error::config("epsilon", "at least one value is required"));
            }
            if self.epsilon.iter().any(|e| !(*e > 0.0 && *e < 1.0)) {
                return Err(Error::config("epsilon", "values must lie in (0, 1)"));
            }
        }
        if kind == Werner {
            if self.levels.is_empty() || self.levels.iter().any(|&k| k < 1) {
                return Err(Error::config("levels", "need levels k >= 1"));
            }
            if let Some([r, p]) = self.werner_grid {
                if r == 0 || p == 0 {
                    return Err(Error::config("werner_grid", "entries must be positive"));
                }
            }
        }
        Ok(())
    }
}

/// True when `z` (lattice units) lies on an edge line of the lattice.
pub fn on_lattice_line(lattice: LatticeKind, z: Point<f64>) -> bool {
    let b = lattice.to_basis(z);
    b.x.fract() == 0.0
        || b.y.fract() == 0.0
        || (lattice == LatticeKind::Triangular && (b.x + b.y).fract() == 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"{"schema_version": 1, "experiment": "total_winding_scaling",
        "n_values": [16, 32], "samples": 4, "seed": 3}"#;

    #[test]
    fn parses_with_defaults() {
        let c = ExperimentConfig::from_json(BASE).unwrap();
        assert_eq!(c.lattice, LatticeKind::Square);
        assert_eq!(c.workers, 1);
        assert_eq!(c.c0, 1.0);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_fields() {
        let extra = BASE.replace("\"seed\": 3", "\"seed\": 3, \"colour\": 1");
        assert!(ExperimentConfig::from_json(&extra).unwrap_err().is_config());
        let unsorted = BASE.replace("[16, 32]", "[32, 16]");
        match ExperimentConfig::from_json(&unsorted).unwrap_err() {
            Error::Config { field, .. } => assert_eq!(field, "n_values"),
            e => panic!("{e}"),
        }
        let version = BASE.replace("\"schema_version\": 1", "\"schema_version\": 2");
        assert!(ExperimentConfig::from_json(&version).is_err());
        let zero = BASE.replace("\"samples\": 4", "\"samples\": 0");
        assert!(ExperimentConfig::from_json(&zero).is_err());
    }

    #[test]
    fn lattice_points_must_avoid_edges() {
        let c = r#"{"schema_version": 1, "experiment": "belisle", "n_values": [100],
            "samples": 4, "seed": 3, "z_points": [[0.5, 1.0]]}"#;
        assert!(ExperimentConfig::from_json(c).is_err());
        assert!(ExperimentConfig::from_json(&c.replace("1.0]", "0.5]")).is_ok());
    }

    #[test]
    fn hash_ignores_workers_and_output() {
        let a = ExperimentConfig::from_json(BASE).unwrap();
        let mut b = a.clone();
        b.workers = 8;
        b.output_dir = "elsewhere".into();
        assert_eq!(a.hash(), b.hash());
        b.seed = 4;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
    }
}
