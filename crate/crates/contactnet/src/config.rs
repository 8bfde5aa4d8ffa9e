//! Declarative experiment configuration (JSON).
//!
//! Every field except `dataset` and `output_dir` has a default; the defaults
//! reproduce the full evaluation protocol (5000 epidemics on the observed
//! network, 100 sampled networks × 50 epidemics per model, β = γ = 0.025,
//! 30 steps, one initial infectious node). See `docs/config.md`.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use contactnet_core::community::SpectralConfig;
use contactnet_core::graph::ClusteringMode;
use contactnet_core::metrics::Quadrature;
use contactnet_core::models::{DcsbmMode, DegreeMode, ModelVariant};
use contactnet_core::sir::SirParams;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::io::{read_text, DatasetFormat};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetSpec {
    /// Relative paths resolve against the config file's directory.
    pub path: PathBuf,
    #[serde(default)]
    pub format: DatasetFormat,
    /// Label used in the quality table; defaults to the file stem.
    #[serde(default)]
    pub name: Option<String>,
}

/// Estimator choice for the variants that have one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelMode {
    None,
    Degree(DegreeMode),
    Dcsbm(DcsbmMode),
}

/// Parse `--mode`/`mode` for a variant; `None` selects the default.
pub fn parse_mode(variant: ModelVariant, mode: Option<&str>) -> Result<ModelMode> {
    let bad = |m: &str| CliError::Config(format!("mode `{m}` does not apply to the {} model", variant.as_str()));
    match (variant, mode) {
        (ModelVariant::Degree, None) => Ok(ModelMode::Degree(DegreeMode::default())),
        (ModelVariant::Degree, Some("exact_sum")) => Ok(ModelMode::Degree(DegreeMode::ExactSum)),
        (ModelVariant::Degree, Some("chung_lu")) => Ok(ModelMode::Degree(DegreeMode::ChungLu)),
        (ModelVariant::Dcsbm, None) => Ok(ModelMode::Dcsbm(DcsbmMode::default())),
        (ModelVariant::Dcsbm, Some("exact")) => Ok(ModelMode::Dcsbm(DcsbmMode::Exact)),
        (ModelVariant::Dcsbm, Some("paper")) => Ok(ModelMode::Dcsbm(DcsbmMode::Paper)),
        (ModelVariant::Er | ModelVariant::Sbm, None) => Ok(ModelMode::None),
        (_, Some(m)) => Err(bad(m)),
    }
}

pub fn parse_variant(s: &str) -> Result<ModelVariant> {
    match s {
        "er" => Ok(ModelVariant::Er),
        "degree" => Ok(ModelVariant::Degree),
        "sbm" => Ok(ModelVariant::Sbm),
        "dcsbm" => Ok(ModelVariant::Dcsbm),
        other => Err(CliError::Usage(format!("unknown model `{other}` (er, degree, sbm, dcsbm)"))),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub variant: ModelVariant,
    /// Column name in reports and the `curves_<name>.csv` suffix.
    #[serde(default)]
    pub name: Option<String>,
    /// `exact_sum` | `chung_lu` (degree), `exact` | `paper` (dcsbm).
    #[serde(default)]
    pub mode: Option<String>,
    /// Community detection for sbm/dcsbm. The k-means seed actually used is
    /// derived from the master seed and this `seed`.
    #[serde(default)]
    pub spectral: SpectralConfig,
}

impl ModelSpec {
    pub fn new(variant: ModelVariant) -> Self {
        ModelSpec { variant, name: None, mode: None, spectral: SpectralConfig::default() }
    }

    pub fn name(&self) -> String {
        self.name.clone().unwrap_or_else(|| self.variant.as_str().to_string())
    }

    pub fn mode(&self) -> Result<ModelMode> {
        parse_mode(self.variant, self.mode.as_deref())
    }
}

fn default_models() -> Vec<ModelSpec> {
    [ModelVariant::Er, ModelVariant::Degree, ModelVariant::Sbm, ModelVariant::Dcsbm]
        .into_iter()
        .map(ModelSpec::new)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnsembleConfig {
    pub actual_runs: usize,
    pub sampled_networks: usize,
    pub runs_per_network: usize,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        EnsembleConfig { actual_runs: 5000, sampled_networks: 100, runs_per_network: 50 }
    }
}

/// How model-side curves are formed before differencing against the
/// observed network's mean curves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AreaAggregation {
    /// One mean curve over all runs on all sampled networks.
    #[default]
    Pooled,
    /// Mean of the areas of each sampled network's own mean curve.
    PerNetwork,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetricOptions {
    pub quadrature: Quadrature,
    pub clustering: ClusteringMode,
    pub aggregation: AreaAggregation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub dataset: DatasetSpec,
    #[serde(default = "default_models")]
    pub models: Vec<ModelSpec>,
    #[serde(default)]
    pub sir: SirParams,
    #[serde(default)]
    pub ensemble: EnsembleConfig,
    #[serde(default)]
    pub master_seed: u64,
    pub output_dir: PathBuf,
    #[serde(default)]
    pub metrics: MetricOptions,
    /// Write every trajectory under `trajectories/`.
    #[serde(default)]
    pub dump_trajectories: bool,
}

impl ExperimentConfig {
    /// Minimal config with protocol defaults.
    pub fn new(dataset: impl Into<PathBuf>, output_dir: impl Into<PathBuf>) -> Self {
        ExperimentConfig {
            dataset: DatasetSpec { path: dataset.into(), format: DatasetFormat::EdgeList, name: None },
            models: default_models(),
            sir: SirParams::default(),
            ensemble: EnsembleConfig::default(),
            master_seed: 0,
            output_dir: output_dir.into(),
            metrics: MetricOptions::default(),
            dump_trajectories: false,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Read a config file, resolving relative paths against its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = read_text(path).map_err(|e| CliError::Config(e.to_string()))?;
        let mut cfg = Self::from_json(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        if cfg.dataset.path.is_relative() {
            cfg.dataset.path = base.join(&cfg.dataset.path);
        }
        if cfg.output_dir.is_relative() {
            cfg.output_dir = base.join(&cfg.output_dir);
        }
        Ok(cfg)
    }

    pub fn dataset_name(&self) -> String {
        self.dataset.name.clone().unwrap_or_else(|| {
            self.dataset
                .path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "dataset".into())
        })
    }

    pub fn validate(&self) -> Result<()> {
        let e = &self.ensemble;
        if e.actual_runs == 0 || e.sampled_networks == 0 || e.runs_per_network == 0 {
            return Err(CliError::Config("ensemble counts must be at least 1".into()));
        }
        self.sir.validate().map_err(|err| CliError::Config(err.to_string()))?;
        if self.models.is_empty() {
            return Err(CliError::Config("no models configured".into()));
        }
        let mut names = BTreeSet::new();
        for m in &self.models {
            m.mode()?;
            let name = m.name();
            if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
                return Err(CliError::Config(format!("model name `{name}` must be [A-Za-z0-9_-]+")));
            }
            if !names.insert(name.clone()) {
                return Err(CliError::Config(format!(
                    "model name `{name}` appears twice; set distinct `name` fields"
                )));
            }
            if m.spectral.kmeans_restarts == 0 {
                return Err(CliError::Config("kmeans_restarts must be at least 1".into()));
            }
            if m.spectral.tau.is_some_and(|t| !(t.is_finite() && t >= 0.0)) {
                return Err(CliError::Config("spectral tau must be finite and nonnegative".into()));
            }
        }
        Ok(())
    }
}
