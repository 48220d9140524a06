//! Run configuration: one TOML document plus command-line overrides.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::hedonic::{ModelSpec, VcMode, YearMode, FULL_COVARIATES};
use crate::scenario::{DEFAULT_K_NEIGHBORS, DEFAULT_N_FLOORS, DEFAULT_RADIUS};
use crate::visibility::SimulationConfig;
use crate::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    pub terrain: Option<PathBuf>,
    pub buildings: Option<PathBuf>,
    pub canopy: Option<PathBuf>,
    pub landcover: Option<PathBuf>,
    pub transactions: Option<PathBuf>,
    pub scorer: Option<PathBuf>,
    pub hedonic_model: Option<PathBuf>,
    pub registry: Option<PathBuf>,
    pub massing: Option<PathBuf>,
    pub attributes: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioParams {
    pub n_floors: u32,
    pub k: usize,
    /// Evaluation radius of a single development, metres.
    pub radius: f64,
    /// Buildings replaced by the massing of a single development.
    pub removed: Vec<String>,
    /// Agglomeration whose VC slope prices the impact.
    pub agglomeration: Option<String>,
}

impl Default for ScenarioParams {
    fn default() -> Self {
        Self {
            n_floors: DEFAULT_N_FLOORS,
            k: DEFAULT_K_NEIGHBORS,
            radius: DEFAULT_RADIUS,
            removed: Vec::new(),
            agglomeration: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitParams {
    pub vc_mode: VcMode,
    pub covariates: Vec<String>,
    pub year_mode: YearMode,
    pub intercept: bool,
    /// Keep only these agglomerations (all when empty).
    pub agglomerations: Vec<String>,
    pub year_min: Option<i32>,
    pub year_max: Option<i32>,
}

impl Default for FitParams {
    fn default() -> Self {
        Self {
            vc_mode: VcMode::ByAgglomeration,
            covariates: FULL_COVARIATES.iter().map(|s| s.to_string()).collect(),
            year_mode: YearMode::Continuous,
            intercept: true,
            agglomerations: Vec::new(),
            year_min: None,
            year_max: None,
        }
    }
}

impl FitParams {
    pub fn spec(&self) -> ModelSpec {
        ModelSpec {
            vc_mode: self.vc_mode,
            covariates: self.covariates.clone(),
            year_mode: self.year_mode,
            intercept: self.intercept,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthParams {
    pub n: usize,
    pub sigma: f64,
}

impl Default for SynthParams {
    fn default() -> Self {
        Self { n: 5000, sigma: 0.1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub paths: Paths,
    pub simulation: SimulationConfig,
    pub scenario: ScenarioParams,
    pub fit: FitParams,
    pub synth: SynthParams,
    pub output_dir: PathBuf,
    /// Worker threads; defaults to the available parallelism.
    pub workers: Option<usize>,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            paths: Paths::default(),
            simulation: SimulationConfig::default(),
            scenario: ScenarioParams::default(),
            fit: FitParams::default(),
            synth: SynthParams::default(),
            output_dir: PathBuf::from("out"),
            workers: None,
            seed: 7,
        }
    }
}

fn resolve(base: &Path, p: &mut Option<PathBuf>) {
    if let Some(path) = p {
        if path.is_relative() {
            *path = base.join(&*path);
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Reads a TOML config. Relative paths inside it are taken relative to
    /// the file's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_toml(&text).map_err(|e| Error::parse(path, e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        let p = &mut cfg.paths;
        for slot in [
            &mut p.terrain,
            &mut p.buildings,
            &mut p.canopy,
            &mut p.landcover,
            &mut p.transactions,
            &mut p.scorer,
            &mut p.hedonic_model,
            &mut p.registry,
            &mut p.massing,
            &mut p.attributes,
        ] {
            resolve(base, slot);
        }
        if cfg.output_dir.is_relative() {
            cfg.output_dir = base.join(&cfg.output_dir);
        }
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    pub fn workers(&self) -> usize {
        self.workers
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
    }

    /// Checks worker count, simulation parameters and that every given path
    /// exists.
    pub fn validate(&self) -> Result<()> {
        if self.workers == Some(0) {
            return Err(Error::Config("worker count must be at least 1".into()));
        }
        self.simulation.validate()?;
        let p = &self.paths;
        for (name, path) in [
            ("terrain", &p.terrain),
            ("buildings", &p.buildings),
            ("canopy", &p.canopy),
            ("landcover", &p.landcover),
            ("transactions", &p.transactions),
            ("scorer", &p.scorer),
            ("hedonic_model", &p.hedonic_model),
            ("registry", &p.registry),
            ("massing", &p.massing),
            ("attributes", &p.attributes),
        ] {
            if let Some(path) = path {
                if !path.exists() {
                    return Err(Error::Config(format!("{name} path {} does not exist", path.display())));
                }
            }
        }
        Ok(())
    }

    pub(crate) fn require<'a>(&self, name: &str, path: &'a Option<PathBuf>) -> Result<&'a Path> {
        path.as_deref()
            .ok_or_else(|| Error::Config(format!("no {name} path given")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_roundtrip_and_defaults() {
        let cfg = RunConfig::from_toml("workers = 2\n[scenario]\nk = 3\n[simulation.rays]\nn_azimuth = 13\n").unwrap();
        assert_eq!(cfg.workers, Some(2));
        assert_eq!(cfg.scenario.k, 3);
        assert_eq!(cfg.scenario.n_floors, 1);
        assert_eq!(cfg.simulation.rays.n_azimuth, 13);
        assert_eq!(cfg.simulation.rays.n_elevation, 40);
        assert_eq!(RunConfig::from_toml(&cfg.to_toml()).unwrap(), cfg);
    }

    #[test]
    fn unknown_keys_and_zero_workers_rejected() {
        assert!(RunConfig::from_toml("wrkers = 2").is_err());
        let cfg = RunConfig {
            workers: Some(0),
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn missing_path_fails_validation() {
        let mut cfg = RunConfig::default();
        cfg.paths.terrain = Some("/nonexistent/terrain.asc".into());
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
    }
}
