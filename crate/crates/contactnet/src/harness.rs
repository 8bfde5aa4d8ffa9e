//! The evaluation protocol: simulate on the observed network, fit each model,
//! simulate on networks sampled from it, and compare.

use std::path::Path;
use std::time::Instant;

use contactnet_core::community::{spectral_cluster_detailed, Partition, SpectralConfig};
use contactnet_core::graph::{clustering_coefficient, degree_stats, density, ClusteringMode, Graph, LabeledGraph};
use contactnet_core::metrics::{area_between, mean_curves, quality_table, MeanCurves, QualityRow, QualityTable};
use contactnet_core::models::{EdgeProbabilityModel, ModelFitReport};
use contactnet_core::seed::{derive_seed, stream};
use contactnet_core::sir::Trajectory;
use serde::{Deserialize, Serialize};

use crate::config::{AreaAggregation, ExperimentConfig, ModelMode, ModelSpec};
use crate::error::{Context, Result};
use crate::io::{self, DatasetFormat};
use crate::parallel::Workers;
use crate::report::{write_outputs, ResultsReport};

/// Stream-branch tags under the master seed.
pub mod branch {
    pub const ACTUAL: u64 = 0;
    pub const SAMPLE: u64 = 1;
    pub const MODEL_EPIDEMICS: u64 = 2;
    pub const SPECTRAL: u64 = 3;
}

/// Summary statistics of one network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub n_nodes: usize,
    pub n_edges: usize,
    /// `None` when fewer than two nodes.
    pub density: Option<f64>,
    pub clustering_average_local: f64,
    pub clustering_global_transitivity: f64,
    pub average_degree: Option<f64>,
    pub maximum_degree: usize,
}

impl DatasetSummary {
    pub fn of(g: &Graph) -> Self {
        let degrees = degree_stats(g).ok();
        DatasetSummary {
            n_nodes: g.n_nodes(),
            n_edges: g.n_edges(),
            density: density(g).ok(),
            clustering_average_local: clustering_coefficient(g, ClusteringMode::AverageLocal),
            clustering_global_transitivity: clustering_coefficient(g, ClusteringMode::GlobalTransitivity),
            average_degree: degrees.as_ref().map(|d| d.average),
            maximum_degree: degrees.map_or(0, |d| d.maximum),
        }
    }

    pub fn clustering(&self, mode: ClusteringMode) -> f64 {
        match mode {
            ClusteringMode::AverageLocal => self.clustering_average_local,
            ClusteringMode::GlobalTransitivity => self.clustering_global_transitivity,
        }
    }

    pub fn render_text(&self) -> String {
        let opt = |x: Option<f64>, d: usize| x.map_or("n/a".to_string(), |v| format!("{v:.d$}"));
        let rows = [
            ("Number of nodes", self.n_nodes.to_string()),
            ("Number of edges", self.n_edges.to_string()),
            ("Graph density", opt(self.density, 4)),
            ("Clustering coefficient (average local)", format!("{:.4}", self.clustering_average_local)),
            ("Clustering coefficient (global transitivity)", format!("{:.4}", self.clustering_global_transitivity)),
            ("Average degree", opt(self.average_degree, 3)),
            ("Maximum degree", self.maximum_degree.to_string()),
        ];
        let w = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        rows.iter().map(|(k, v)| format!("{k:<w$}  {v}\n")).collect()
    }
}

/// Summary statistics of a dataset file.
pub fn dataset_stats(path: &Path, format: DatasetFormat) -> Result<DatasetSummary> {
    let lg = io::read_dataset(path, format)?;
    Ok(DatasetSummary::of(&lg.graph))
}

/// Memoizes spectral partitions so models sharing a configuration (SBM and
/// DC-SBM by default) share communities.
#[derive(Default)]
pub struct PartitionCache {
    entries: Vec<(SpectralConfig, Partition)>,
}

impl PartitionCache {
    pub fn get_or_compute(&mut self, g: &Graph, config: &SpectralConfig) -> Result<Partition> {
        if let Some((_, p)) = self.entries.iter().find(|(c, _)| c == config) {
            return Ok(p.clone());
        }
        let outcome = spectral_cluster_detailed(g, config).context(|| "spectral clustering".into())?;
        self.entries.push((config.clone(), outcome.partition.clone()));
        Ok(outcome.partition)
    }
}

/// Spectral settings with the k-means seed tied to the master seed.
pub fn effective_spectral(spec: &ModelSpec, master_seed: u64) -> SpectralConfig {
    SpectralConfig { seed: derive_seed(master_seed, &[branch::SPECTRAL, spec.spectral.seed]), ..spec.spectral.clone() }
}

pub fn fit_model(
    g: &Graph,
    spec: &ModelSpec,
    master_seed: u64,
    cache: &mut PartitionCache,
) -> Result<EdgeProbabilityModel> {
    let ctx = || format!("fitting model `{}`", spec.name());
    match spec.mode()? {
        ModelMode::None if spec.variant == contactnet_core::models::ModelVariant::Er => {
            EdgeProbabilityModel::fit_er(g).context(ctx)
        }
        ModelMode::None => {
            let p = cache.get_or_compute(g, &effective_spectral(spec, master_seed))?;
            EdgeProbabilityModel::fit_sbm(g, &p).context(ctx)
        }
        ModelMode::Degree(mode) => EdgeProbabilityModel::fit_degree(g, mode).context(ctx),
        ModelMode::Dcsbm(mode) => {
            let p = cache.get_or_compute(g, &effective_spectral(spec, master_seed))?;
            EdgeProbabilityModel::fit_dcsbm(g, &p, mode).context(ctx)
        }
    }
}

#[derive(Debug, Clone)]
pub struct ModelOutcome {
    pub name: String,
    pub model: EdgeProbabilityModel,
    pub fit: ModelFitReport,
    /// Pooled mean over every run on every sampled network.
    pub curves: MeanCurves,
    /// Area of each sampled network's own mean curve against the observed curves.
    pub per_network_areas: Vec<f64>,
    /// Area under the configured aggregation.
    pub area: f64,
    pub mean_sampled_edges: f64,
    /// `[network][run]`, kept only when trajectory dumps are requested.
    pub trajectories: Option<Vec<Vec<Trajectory>>>,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub dataset_name: String,
    pub summary: DatasetSummary,
    pub actual_curves: MeanCurves,
    pub actual_trajectories: Option<Vec<Trajectory>>,
    pub models: Vec<ModelOutcome>,
    pub table: QualityTable,
}

/// Run the protocol in memory on an already-loaded graph.
pub fn run_protocol(lg: &LabeledGraph, cfg: &ExperimentConfig, workers: &Workers) -> Result<ExperimentOutcome> {
    cfg.validate()?;
    let g = &lg.graph;
    let master = cfg.master_seed;
    let ens = cfg.ensemble;
    let keep = cfg.dump_trajectories;

    let mut cache = PartitionCache::default();
    let fitted: Vec<(String, EdgeProbabilityModel)> = cfg
        .models
        .iter()
        .map(|spec| Ok((spec.name(), fit_model(g, spec, master, &mut cache)?)))
        .collect::<Result<_>>()?;

    let actual = workers.simulate_ensemble(g, &cfg.sir, ens.actual_runs, derive_seed(master, &[branch::ACTUAL]))?;
    let actual_curves = mean_curves(&actual, g.n_nodes()).context(|| "observed-network curves".into())?;

    let mut models = Vec::with_capacity(fitted.len());
    for (m, (name, model)) in fitted.into_iter().enumerate() {
        let fit = model.fit_report(g).context(|| format!("fit report for `{name}`"))?;
        let per_network = workers.map_indexed(ens.sampled_networks, |net| -> contactnet_core::Result<_> {
            let sampled = model.sample_graph(&mut stream(master, &[branch::SAMPLE, m as u64, net as u64]));
            let seed = derive_seed(master, &[branch::MODEL_EPIDEMICS, m as u64, net as u64]);
            let runs = contactnet_core::sir::simulate_ensemble(&sampled, &cfg.sir, ens.runs_per_network, seed)?;
            Ok((sampled.n_edges(), runs))
        });
        let per_network: Vec<(usize, Vec<Trajectory>)> = per_network
            .into_iter()
            .collect::<contactnet_core::Result<_>>()
            .context(|| format!("epidemics on `{name}` networks"))?;

        let pooled: Vec<Trajectory> = per_network.iter().flat_map(|(_, runs)| runs.iter().cloned()).collect();
        let curves = mean_curves(&pooled, g.n_nodes()).context(|| format!("`{name}` curves"))?;
        let per_network_areas = per_network
            .iter()
            .map(|(_, runs)| {
                let c = mean_curves(runs, g.n_nodes())?;
                area_between(&actual_curves, &c, cfg.metrics.quadrature)
            })
            .collect::<contactnet_core::Result<Vec<f64>>>()
            .context(|| format!("`{name}` per-network areas"))?;
        let area = match cfg.metrics.aggregation {
            AreaAggregation::Pooled => {
                area_between(&actual_curves, &curves, cfg.metrics.quadrature).context(|| format!("`{name}` area"))?
            }
            AreaAggregation::PerNetwork => per_network_areas.iter().sum::<f64>() / per_network_areas.len() as f64,
        };
        let mean_sampled_edges =
            per_network.iter().map(|(e, _)| *e as f64).sum::<f64>() / per_network.len() as f64;
        models.push(ModelOutcome {
            name,
            model,
            fit,
            curves,
            per_network_areas,
            area,
            mean_sampled_edges,
            trajectories: keep.then(|| per_network.into_iter().map(|(_, runs)| runs).collect()),
        });
    }

    let dataset_name = cfg.dataset_name();
    let rows: Vec<QualityRow> = models
        .iter()
        .map(|m| QualityRow {
            dataset: dataset_name.clone(),
            model_name: m.name.clone(),
            area: m.area,
            neg_log_likelihood_per_pair: -m.fit.log_likelihood_per_pair,
            parameter_count: m.fit.parameter_count,
        })
        .collect();

    Ok(ExperimentOutcome {
        dataset_name,
        summary: DatasetSummary::of(g),
        actual_curves,
        actual_trajectories: keep.then_some(actual),
        models,
        table: quality_table(&rows),
    })
}

/// Load the dataset, run the protocol and write every artifact to
/// `cfg.output_dir`. Config and input problems are reported before any
/// simulation starts.
pub fn run_experiment(cfg: &ExperimentConfig, workers: &Workers) -> Result<ResultsReport> {
    let started = Instant::now();
    cfg.validate()?;
    let lg = io::read_dataset(&cfg.dataset.path, cfg.dataset.format)?;
    let outcome = run_protocol(&lg, cfg, workers)?;
    let report = ResultsReport::new(cfg, &outcome);
    write_outputs(cfg, &lg, &outcome, &report, started.elapsed())?;
    Ok(report)
}
