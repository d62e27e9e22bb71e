//! JSON configuration for the `experiment` subcommand.
//!
//! The schema is versioned; deserialization rejects unknown keys and reports
//! the offending key path, so typos fail loudly instead of silently falling
//! back to defaults.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use mixsel::{
    k_grid, CollectionKind, CollectionLimits, DeltaMeasure, PenaltyEvaluation, ProcessSpec,
    WeightKind,
};

use crate::error::{validation, CliError, Result};

/// Version of the config/summary schema this binary reads and writes.
pub const SCHEMA_VERSION: u32 = 1;

/// Top-level experiment description.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_schema_version")]
    pub schema_version: u32,
    /// Data-generating process; its `seed` field is ignored here (the
    /// top-level `seed` governs every replication stream).
    pub process: ProcessSpec,
    pub collection: CollectionConfig,
    /// Sample sizes; the experiment runs the cross product of `n` and `q`.
    pub n: Vec<usize>,
    /// Block-length overrides; omit to use the default `√n / (2 ln² n)` rule.
    #[serde(default)]
    pub q: Option<Vec<usize>>,
    #[serde(default)]
    pub penalty: PenaltySection,
    #[serde(default)]
    pub slope: SlopeSection,
    #[serde(default = "default_replications")]
    pub replications: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

fn default_schema_version() -> u32 {
    SCHEMA_VERSION
}

fn default_replications() -> usize {
    100
}

/// Which model collection to enumerate, with optional caps.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CollectionConfig {
    pub kind: CollectionKind,
    /// Cap on the histogram/fourier resolution index.
    #[serde(default)]
    pub model_cap: Option<u32>,
    /// Cap on the Haar level `J`.
    #[serde(default)]
    pub level_cap: Option<u32>,
}

impl CollectionConfig {
    pub fn limits(&self) -> CollectionLimits {
        let mut limits = CollectionLimits::default();
        if let Some(cap) = self.model_cap {
            limits.model_cap = cap;
        }
        limits.level_cap = self.level_cap;
        limits
    }
}

/// Penalization settings.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PenaltySection {
    #[serde(default = "default_law")]
    pub law: WeightKind,
    /// Multiplier κ on the law's own constant, i.e. `C = κ C̃_W`.
    #[serde(default = "default_multiplier")]
    pub c_multiplier: f64,
    #[serde(default)]
    pub method: MethodConfig,
}

fn default_law() -> WeightKind {
    WeightKind::MultinomialBlockBootstrap
}

fn default_multiplier() -> f64 {
    1.0
}

impl Default for PenaltySection {
    fn default() -> Self {
        PenaltySection {
            law: default_law(),
            c_multiplier: default_multiplier(),
            method: MethodConfig::default(),
        }
    }
}

/// Closed form or Monte-Carlo penalty evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MethodConfig {
    #[default]
    ClosedForm,
    MonteCarlo { replicates: usize },
}

impl MethodConfig {
    pub fn evaluation(&self) -> PenaltyEvaluation {
        match *self {
            MethodConfig::ClosedForm => PenaltyEvaluation::ClosedForm,
            MethodConfig::MonteCarlo { replicates } => PenaltyEvaluation::MonteCarlo { replicates },
        }
    }
}

/// Slope-heuristic settings.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlopeSection {
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default = "default_delta")]
    pub delta: DeltaMeasure,
}

fn default_delta() -> DeltaMeasure {
    DeltaMeasure::PenWUnit
}

impl Default for SlopeSection {
    fn default() -> Self {
        SlopeSection { grid: GridConfig::default(), delta: default_delta() }
    }
}

/// An evenly spaced multiplier grid.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { start: 0.0, stop: 4.0, step: 0.05 }
    }
}

impl GridConfig {
    pub fn build(&self) -> mixsel::Result<Vec<f64>> {
        k_grid(self.start, self.stop, self.step)
    }
}

impl FromStr for GridConfig {
    type Err = CliError;

    /// Parses the `start:stop:step` flag form.
    fn from_str(s: &str) -> Result<GridConfig> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(validation(format!("grid `{s}` is not of the form start:stop:step")));
        }
        let mut nums = [0.0f64; 3];
        for (slot, part) in nums.iter_mut().zip(&parts) {
            *slot = part
                .trim()
                .parse::<f64>()
                .map_err(|e| validation(format!("grid component `{part}`: {e}")))?;
        }
        Ok(GridConfig { start: nums[0], stop: nums[1], step: nums[2] })
    }
}

/// Reads and deserializes a config file, reporting the key path on failure.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| validation(format!("cannot read config {}: {e}", path.display())))?;
    let mut de = serde_json::Deserializer::from_str(&text);
    let config: ExperimentConfig = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        validation(format!(
            "malformed config {}: key path `{}`: {}",
            path.display(),
            e.path(),
            e.inner()
        ))
    })?;
    Ok(config)
}

impl ExperimentConfig {
    /// Full upfront validation; anything caught here is a validation error
    /// (exit 1) rather than a mid-run failure.
    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(validation(format!(
                "`schema_version`: got {}, this binary supports {SCHEMA_VERSION}",
                self.schema_version
            )));
        }
        self.process.validate().map_err(|e| validation(format!("`process`: {e}")))?;
        if self.n.is_empty() {
            return Err(validation("`n`: need at least one sample size"));
        }
        for (i, &n) in self.n.iter().enumerate() {
            if n < 8 {
                return Err(validation(format!("`n[{i}]`: {n} is below the minimum of 8")));
            }
        }
        if let Some(qs) = &self.q {
            if qs.is_empty() {
                return Err(validation("`q`: empty list (omit the key to use the default rule)"));
            }
            for (i, &q) in qs.iter().enumerate() {
                if q == 0 {
                    return Err(validation(format!("`q[{i}]`: block length must be positive")));
                }
            }
        }
        if !self.penalty.c_multiplier.is_finite() || self.penalty.c_multiplier < 0.0 {
            return Err(validation(format!(
                "`penalty.c_multiplier`: {} is not a finite nonnegative number",
                self.penalty.c_multiplier
            )));
        }
        if let MethodConfig::MonteCarlo { replicates } = self.penalty.method {
            if replicates == 0 {
                return Err(validation("`penalty.method.replicates`: need at least one draw"));
            }
        }
        self.slope.grid.build().map_err(|e| validation(format!("`slope.grid`: {e}")))?;
        if self.replications == 0 {
            return Err(validation("`replications`: need at least one replication"));
        }
        Ok(())
    }
}
