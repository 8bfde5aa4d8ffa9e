//! The machine-readable results report and artifact writing.
//!
//! `report.json` is a pure function of the dataset, the config and the master
//! seed: it holds no timestamps, absolute paths or timings, so two runs with
//! the same inputs produce byte-identical files regardless of thread count.
//! Wall-clock time goes to `timing.json` instead.

use std::path::Path;
use std::time::Duration;

use contactnet_core::graph::{ClusteringMode, LabeledGraph};
use contactnet_core::metrics::{QualityRow, QualitySummary};
use contactnet_core::models::ModelVariant;
use contactnet_core::sir::SirParams;
use serde::{Serialize, Serializer};

use crate::config::{EnsembleConfig, ExperimentConfig, MetricOptions, ModelSpec};
use crate::harness::{DatasetSummary, ExperimentOutcome};
use crate::io::{self, DatasetFormat};

pub const TOOL_NAME: &str = "contactnet";
pub const REPORT_FORMAT: &str = "contactnet-report/1";

/// A float that serializes non-finite values as the strings `"inf"`,
/// `"-inf"` and `"nan"` (JSON has no representation for them).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtReal(pub f64);

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let x = self.0;
        if x.is_finite() {
            s.serialize_f64(x)
        } else if x.is_nan() {
            s.serialize_str("nan")
        } else if x > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DatasetSection {
    pub name: String,
    pub format: DatasetFormat,
    #[serde(flatten)]
    pub summary: DatasetSummary,
    /// Clustering coefficient under the configured mode.
    pub clustering: f64,
    pub clustering_mode: ClusteringMode,
}

#[derive(Debug, Clone, Serialize)]
pub struct ModelSection {
    pub name: String,
    pub variant: ModelVariant,
    pub display_name: &'static str,
    pub estimator: String,
    pub parameter_count: usize,
    pub log_likelihood_per_pair: ExtReal,
    pub neg_log_likelihood_per_pair: ExtReal,
    pub capped_pairs: u64,
    /// Number of communities for block models.
    pub communities: Option<usize>,
    pub expected_edges: f64,
    pub mean_sampled_edges: f64,
    pub area: f64,
    pub per_network_area_mean: f64,
    pub per_network_area_min: f64,
    pub per_network_area_max: f64,
    pub final_attack_rate: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TableRow {
    pub dataset: String,
    pub model_name: String,
    pub area: f64,
    pub neg_log_likelihood_per_pair: ExtReal,
    pub parameter_count: usize,
}

impl From<&QualityRow> for TableRow {
    fn from(r: &QualityRow) -> Self {
        TableRow {
            dataset: r.dataset.clone(),
            model_name: r.model_name.clone(),
            area: r.area,
            neg_log_likelihood_per_pair: ExtReal(r.neg_log_likelihood_per_pair),
            parameter_count: r.parameter_count,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TableSummary {
    pub model_name: String,
    pub datasets: usize,
    pub area: f64,
    pub neg_log_likelihood_per_pair: ExtReal,
    pub parameter_count: f64,
    pub best_area: bool,
    pub best_nll: bool,
    pub best_parameters: bool,
}

impl From<&QualitySummary> for TableSummary {
    fn from(s: &QualitySummary) -> Self {
        TableSummary {
            model_name: s.model_name.clone(),
            datasets: s.datasets,
            area: s.area,
            neg_log_likelihood_per_pair: ExtReal(s.neg_log_likelihood_per_pair),
            parameter_count: s.parameter_count,
            best_area: s.best_area,
            best_nll: s.best_nll,
            best_parameters: s.best_parameters,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct QualitySection {
    pub rows: Vec<TableRow>,
    pub summary: Vec<TableSummary>,
}

/// The reproducibility-relevant part of the config (paths excluded).
#[derive(Debug, Clone, Serialize)]
pub struct ConfigEcho {
    pub dataset_file: String,
    pub models: Vec<ModelSpec>,
    pub sir: SirParams,
    pub ensemble: EnsembleConfig,
    pub metrics: MetricOptions,
}

#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub master_seed: u64,
    pub config: ConfigEcho,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResultsReport {
    pub format: &'static str,
    pub dataset: DatasetSection,
    pub models: Vec<ModelSection>,
    pub quality_table: QualitySection,
    pub provenance: Provenance,
}

fn attack_rate(c: &contactnet_core::metrics::MeanCurves) -> f64 {
    match (c.i_frac.last(), c.r_frac.last()) {
        (Some(i), Some(r)) => i + r,
        _ => 0.0,
    }
}

impl ResultsReport {
    pub fn new(cfg: &ExperimentConfig, out: &ExperimentOutcome) -> Self {
        let models = out
            .models
            .iter()
            .map(|m| {
                let areas = &m.per_network_areas;
                ModelSection {
                    name: m.name.clone(),
                    variant: m.fit.variant,
                    display_name: m.fit.variant.display_name(),
                    estimator: m.fit.estimator.clone(),
                    parameter_count: m.fit.parameter_count,
                    log_likelihood_per_pair: ExtReal(m.fit.log_likelihood_per_pair),
                    neg_log_likelihood_per_pair: ExtReal(-m.fit.log_likelihood_per_pair),
                    capped_pairs: m.fit.capped_pairs,
                    communities: m.model.partition().map(|p| p.k()),
                    expected_edges: m.model.expected_edges(),
                    mean_sampled_edges: m.mean_sampled_edges,
                    area: m.area,
                    per_network_area_mean: areas.iter().sum::<f64>() / areas.len() as f64,
                    per_network_area_min: areas.iter().copied().fold(f64::INFINITY, f64::min),
                    per_network_area_max: areas.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                    final_attack_rate: attack_rate(&m.curves),
                }
            })
            .collect();
        ResultsReport {
            format: REPORT_FORMAT,
            dataset: DatasetSection {
                name: out.dataset_name.clone(),
                format: cfg.dataset.format,
                clustering: out.summary.clustering(cfg.metrics.clustering),
                clustering_mode: cfg.metrics.clustering,
                summary: out.summary.clone(),
            },
            models,
            quality_table: QualitySection {
                rows: out.table.rows.iter().map(TableRow::from).collect(),
                summary: out.table.summary.iter().map(TableSummary::from).collect(),
            },
            provenance: Provenance {
                tool: TOOL_NAME,
                version: env!("CARGO_PKG_VERSION"),
                master_seed: cfg.master_seed,
                config: ConfigEcho {
                    dataset_file: cfg
                        .dataset
                        .path
                        .file_name()
                        .map(|s| s.to_string_lossy().into_owned())
                        .unwrap_or_default(),
                    models: cfg.models.clone(),
                    sir: cfg.sir,
                    ensemble: cfg.ensemble,
                    metrics: cfg.metrics,
                },
            },
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialization is infallible");
        s.push('\n');
        s
    }
}

/// Write `report.json`, `quality_table.txt`, the curve CSVs, the partition
/// (when a block model is present), optional trajectory dumps and
/// `timing.json` under `cfg.output_dir`.
pub fn write_outputs(
    cfg: &ExperimentConfig,
    lg: &LabeledGraph,
    out: &ExperimentOutcome,
    report: &ResultsReport,
    elapsed: Duration,
) -> crate::error::Result<()> {
    let dir = &cfg.output_dir;
    io::write_text(&dir.join("report.json"), &report.to_json())?;
    io::write_text(&dir.join("quality_table.txt"), &out.table.render_text())?;
    io::write_text(&dir.join("curves_actual.csv"), &io::curves_csv(&out.actual_curves))?;
    for m in &out.models {
        io::write_text(&dir.join(format!("curves_{}.csv", m.name)), &io::curves_csv(&m.curves))?;
    }
    if let Some(p) = out.models.iter().find_map(|m| m.model.partition()) {
        io::write_text(&dir.join("partition.csv"), &io::partition_csv(p, &lg.labels))?;
    }
    if cfg.dump_trajectories {
        write_trajectories(&dir.join("trajectories"), out)?;
    }
    let timing = serde_json::json!({ "wall_clock_seconds": elapsed.as_secs_f64() });
    io::write_text(&dir.join("timing.json"), &format!("{timing:#}\n"))?;
    Ok(())
}

fn write_trajectories(dir: &Path, out: &ExperimentOutcome) -> crate::error::Result<()> {
    if let Some(actual) = &out.actual_trajectories {
        io::write_text(&dir.join("actual.csv"), &io::trajectories_csv(actual, 0))?;
    }
    for m in &out.models {
        if let Some(nets) = &m.trajectories {
            let mut text = String::new();
            let mut first = 0;
            for (net, runs) in nets.iter().enumerate() {
                let csv = io::trajectories_csv(runs, first);
                first += runs.len();
                // Keep a single header; prefix each row with the network index.
                for (line_no, line) in csv.lines().enumerate() {
                    if line_no == 0 {
                        if net == 0 {
                            text.push_str("network,");
                            text.push_str(line);
                            text.push('\n');
                        }
                    } else {
                        text.push_str(&format!("{net},{line}\n"));
                    }
                }
            }
            io::write_text(&dir.join(format!("{}.csv", m.name)), &text)?;
        }
    }
    Ok(())
}
