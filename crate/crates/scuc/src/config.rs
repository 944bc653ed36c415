//! Run configuration: a TOML file (the bundled `study_defaults.toml` unless
//! another is given) overlaid with command-line flags.

use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Deserialize;
use thiserror::Error;

use scuc_core::metrics::{OverloadAggregation, DEFAULT_OVERLOAD_THRESHOLD};
use scuc_core::{ModelSpec, SolveOptions, Variant};

use crate::solver::SolverKind;

/// The headline experiment, checked in next to the bundled cases.
pub const STUDY_DEFAULTS: &str = include_str!("../config/study_defaults.toml");

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{origin}: {source}")]
    Parse { origin: String, source: toml::de::Error },
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    case: Option<PathBuf>,
    variants: Option<Vec<String>>,
    betas: Option<Vec<f64>>,
    solver: Option<String>,
    solver_binary: Option<PathBuf>,
    penalty: Option<f64>,
    curtailment_epsilon: Option<f64>,
    mip_gap: Option<f64>,
    time_limit_s: Option<f64>,
    threads: Option<usize>,
    cyclic_ramp: Option<bool>,
    screening: Option<bool>,
    overload_threshold: Option<f64>,
    overload_aggregation: Option<String>,
    out: Option<PathBuf>,
    seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Case file path or bundled case name.
    pub case: PathBuf,
    pub variants: Vec<Variant>,
    pub betas: Vec<f64>,
    pub solver: SolverKind,
    pub solver_binary: Option<PathBuf>,
    pub penalty: f64,
    pub curtailment_epsilon: f64,
    pub mip_gap: f64,
    pub time_limit: Option<Duration>,
    pub threads: Option<usize>,
    pub cyclic_ramp: bool,
    /// Solve by contingency screening instead of handing over the full model.
    pub screening: bool,
    pub overload_threshold: f64,
    pub overload_aggregation: OverloadAggregation,
    pub out: PathBuf,
    /// Reserved; nothing in the pipeline is random.
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let spec = ModelSpec::default();
        Self {
            case: PathBuf::from("rts24_dc"),
            variants: Variant::ALL.to_vec(),
            betas: vec![0.1, 0.2, 0.3, 0.4],
            solver: SolverKind::default(),
            solver_binary: None,
            penalty: spec.penalty,
            curtailment_epsilon: spec.curtailment_epsilon,
            mip_gap: spec.solver.mip_gap,
            time_limit: None,
            threads: None,
            cyclic_ramp: spec.cyclic_ramp,
            screening: true,
            overload_threshold: DEFAULT_OVERLOAD_THRESHOLD,
            overload_aggregation: OverloadAggregation::default(),
            out: PathBuf::from("out"),
            seed: 0,
        }
    }
}

impl RunConfig {
    pub fn study_defaults() -> Self {
        Self::default().overlay_str(STUDY_DEFAULTS, "study_defaults.toml").expect("bundled defaults parse")
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_owned(),
            source,
        })?;
        Self::study_defaults().overlay_str(&text, &path.display().to_string())
    }

    /// Applies the keys present in `text` on top of `self`.
    pub fn overlay_str(mut self, text: &str, origin: &str) -> Result<Self, ConfigError> {
        let raw: RawConfig = toml::from_str(text).map_err(|source| ConfigError::Parse {
            origin: origin.to_owned(),
            source,
        })?;
        if let Some(v) = raw.case {
            self.case = v;
        }
        if let Some(v) = raw.variants {
            self.variants = v.iter().map(|s| parse_variant(s)).collect::<Result<_, _>>()?;
        }
        if let Some(v) = raw.betas {
            self.betas = v;
        }
        if let Some(v) = raw.solver {
            self.solver = v.parse().map_err(ConfigError::Invalid)?;
        }
        if raw.solver_binary.is_some() {
            self.solver_binary = raw.solver_binary;
        }
        if let Some(v) = raw.penalty {
            self.penalty = v;
        }
        if let Some(v) = raw.curtailment_epsilon {
            self.curtailment_epsilon = v;
        }
        if let Some(v) = raw.mip_gap {
            self.mip_gap = v;
        }
        if let Some(v) = raw.time_limit_s {
            self.time_limit = Some(seconds(v)?);
        }
        if raw.threads.is_some() {
            self.threads = raw.threads;
        }
        if let Some(v) = raw.cyclic_ramp {
            self.cyclic_ramp = v;
        }
        if let Some(v) = raw.screening {
            self.screening = v;
        }
        if let Some(v) = raw.overload_threshold {
            self.overload_threshold = v;
        }
        if let Some(v) = raw.overload_aggregation {
            self.overload_aggregation = v.parse().map_err(ConfigError::Invalid)?;
        }
        if let Some(v) = raw.out {
            self.out = v;
        }
        if let Some(v) = raw.seed {
            self.seed = v;
        }
        Ok(self)
    }

    /// Checks the ranges that do not need the case; the model spec is
    /// checked against the case when it is built.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.mip_gap > 0.0 && self.mip_gap < 1.0) {
            return Err(ConfigError::Invalid(format!("mip_gap {} must lie in (0, 1)", self.mip_gap)));
        }
        if let Some(b) = self.betas.iter().find(|b| !(0.0..=1.0).contains(*b)) {
            return Err(ConfigError::Invalid(format!("beta {b} outside [0, 1]")));
        }
        if self.variants.is_empty() {
            return Err(ConfigError::Invalid("no variants selected".into()));
        }
        if self.variants.iter().any(|v| v.is_flexible()) && self.betas.is_empty() {
            return Err(ConfigError::Invalid("empty beta list".into()));
        }
        if !(self.overload_threshold > 0.0) {
            return Err(ConfigError::Invalid(format!(
                "overload threshold {} must be positive",
                self.overload_threshold
            )));
        }
        if self.threads == Some(0) {
            return Err(ConfigError::Invalid("threads must be at least 1".into()));
        }
        Ok(())
    }

    pub fn solve_options(&self) -> SolveOptions {
        SolveOptions {
            mip_gap: self.mip_gap,
            time_limit: self.time_limit,
            threads: self.threads,
            seed: Some(self.seed),
            verbose: false,
        }
    }

    pub fn model_spec(&self, variant: Variant, beta: f64) -> ModelSpec {
        ModelSpec {
            variant,
            beta,
            penalty: self.penalty,
            curtailment_epsilon: self.curtailment_epsilon,
            cyclic_ramp: self.cyclic_ramp,
            solver: self.solve_options(),
        }
    }

    /// Checks that the output directory exists or can be created, and
    /// accepts files.
    pub fn prepare_out(&self) -> Result<(), ConfigError> {
        let fail = |e: std::io::Error| ConfigError::Invalid(format!("output directory {}: {e}", self.out.display()));
        std::fs::create_dir_all(&self.out).map_err(fail)?;
        tempfile::tempfile_in(&self.out).map_err(fail)?;
        Ok(())
    }
}

pub fn parse_variant(s: &str) -> Result<Variant, ConfigError> {
    s.parse().map_err(|e: scuc_core::SpecError| ConfigError::Invalid(e.to_string()))
}

pub fn seconds(s: f64) -> Result<Duration, ConfigError> {
    Duration::try_from_secs_f64(s).map_err(|_| ConfigError::Invalid(format!("time limit {s} s is not a valid duration")))
}
