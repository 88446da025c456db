//! Experiment configuration, loaded from JSON with unknown keys rejected.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::profiles::ProfileSpec;
use crate::baselines::{GdConfig, PsoConfig};
use crate::bayes_opt::{AcquisitionConfig, BoRunConfig};
use crate::error::{Error, Result};
use crate::identification::ParameterBox;
use crate::model::Cell;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Gd,
    Pso,
    Bo,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Gd, Method::Pso, Method::Bo];

    pub fn name(self) -> &'static str {
        match self {
            Method::Gd => "gd",
            Method::Pso => "pso",
            Method::Bo => "bo",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gd" => Ok(Method::Gd),
            "pso" => Ok(Method::Pso),
            "bo" => Ok(Method::Bo),
            _ => Err(Error::InvalidConfig(format!("unknown method {s:?}"))),
        }
    }
}

/// Bayesian-optimization settings other than budget and seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BoSettings {
    pub initial_samples: usize,
    pub acquisition: AcquisitionConfig,
    pub jitter: f64,
    pub standardize: bool,
}

impl Default for BoSettings {
    fn default() -> Self {
        let c = BoRunConfig::default();
        Self {
            initial_samples: c.initial_samples,
            acquisition: c.acquisition,
            jitter: c.jitter,
            standardize: c.standardize,
        }
    }
}

impl BoSettings {
    pub fn run_config(&self, budget: usize, seed: u64) -> BoRunConfig {
        BoRunConfig {
            initial_samples: self.initial_samples,
            budget,
            seed,
            acquisition: self.acquisition.clone(),
            jitter: self.jitter,
            standardize: self.standardize,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GdSettings {
    pub step: f64,
    pub epsilon: f64,
}

impl Default for GdSettings {
    fn default() -> Self {
        let c = GdConfig::default();
        Self {
            step: c.step,
            epsilon: c.epsilon,
        }
    }
}

impl GdSettings {
    pub fn run_config(&self, budget: usize, seed: u64) -> GdConfig {
        GdConfig {
            step: self.step,
            epsilon: self.epsilon,
            budget,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PsoSettings {
    pub swarm_size: usize,
    pub inertia: f64,
    pub cognitive: f64,
    pub social: f64,
    pub max_velocity: f64,
}

impl Default for PsoSettings {
    fn default() -> Self {
        let c = PsoConfig::default();
        Self {
            swarm_size: c.swarm_size,
            inertia: c.inertia,
            cognitive: c.cognitive,
            social: c.social,
            max_velocity: c.max_velocity,
        }
    }
}

impl PsoSettings {
    pub fn run_config(&self, budget: usize, seed: u64) -> PsoConfig {
        PsoConfig {
            swarm_size: self.swarm_size,
            inertia: self.inertia,
            cognitive: self.cognitive,
            social: self.social,
            max_velocity: self.max_velocity,
            budget,
            seed,
        }
    }
}

fn default_methods() -> Vec<Method> {
    Method::ALL.to_vec()
}

fn default_budget() -> usize {
    50
}

fn default_repetitions() -> usize {
    10
}

fn default_train() -> Vec<ProfileSpec> {
    vec![ProfileSpec::rcid("rcid", 3600.0)]
}

fn default_test() -> Vec<ProfileSpec> {
    vec![ProfileSpec::drive_cycle("drive", 1800.0, 7)]
}

/// One benchmark experiment.
///
/// Repetition `r` runs every method with seed `split_seed(seed, r)`. The
/// training data carries noise stream `noise_seed`, the test data stream
/// `noise_seed + 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Parameter file of the ground-truth cell; the built-in reference cell
    /// when absent. Relative paths are resolved against the config file.
    #[serde(default)]
    pub params: Option<PathBuf>,
    /// Existing dataset manifest. When absent the data is synthesized from
    /// the ground-truth cell and the profile specs below.
    #[serde(default)]
    pub dataset: Option<PathBuf>,
    #[serde(default = "ParameterBox::reference")]
    pub bounds: ParameterBox,
    #[serde(default = "default_methods")]
    pub methods: Vec<Method>,
    #[serde(default = "default_budget")]
    pub budget: usize,
    #[serde(default = "default_repetitions")]
    pub repetitions: usize,
    /// Standard deviation of the additive voltage noise, V.
    #[serde(default)]
    pub noise_sigma_v: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub noise_seed: u64,
    #[serde(default = "default_train")]
    pub train: Vec<ProfileSpec>,
    #[serde(default = "default_test")]
    pub test: Vec<ProfileSpec>,
    #[serde(default)]
    pub bo: BoSettings,
    #[serde(default)]
    pub gd: GdSettings,
    #[serde(default)]
    pub pso: PsoSettings,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("all fields have defaults")
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.repetitions < 1 {
            return Err(Error::InvalidConfig("repetitions must be at least 1".into()));
        }
        if self.budget < 2 {
            return Err(Error::InvalidConfig("budget must be at least 2".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::InvalidConfig("method list is empty".into()));
        }
        let mut seen = self.methods.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.methods.len() {
            return Err(Error::InvalidConfig("method listed twice".into()));
        }
        if !(self.noise_sigma_v >= 0.0 && self.noise_sigma_v.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "noise_sigma_v must be non-negative, got {}",
                self.noise_sigma_v
            )));
        }
        if self.dataset.is_none() && (self.train.is_empty() || self.test.is_empty()) {
            return Err(Error::InvalidConfig("need train and test profiles".into()));
        }
        self.bounds.validate()?;
        if self.bounds.dim() != 3 {
            return Err(Error::InvalidConfig(format!(
                "box must have 3 dimensions, has {}",
                self.bounds.dim()
            )));
        }
        for m in &self.methods {
            match m {
                Method::Bo => self.bo.run_config(self.budget, 0).validate()?,
                Method::Pso => self.pso.run_config(self.budget, 0).validate()?,
                Method::Gd => {
                    if !(self.gd.step > 0.0 && self.gd.epsilon > 0.0) {
                        return Err(Error::InvalidConfig("gd step and epsilon must be positive".into()));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self =
            serde_json::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    /// Reads a config file and resolves its relative paths.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut config = Self::from_json(&text)
            .map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [&mut config.params, &mut config.dataset].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(config)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// The ground-truth cell.
    pub fn cell(&self) -> Result<Cell> {
        match &self.params {
            Some(p) => Cell::load(p),
            None => Ok(Cell::reference()),
        }
    }
}
