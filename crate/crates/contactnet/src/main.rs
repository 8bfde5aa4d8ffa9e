use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use contactnet::config::{parse_variant, ExperimentConfig, ModelSpec};
use contactnet::error::{CliError, Context, Result, EXIT_OK, EXIT_USAGE};
use contactnet::harness::{self, branch, DatasetSummary, PartitionCache};
use contactnet::io::{self, DatasetFormat, ModelDocument};
use contactnet::parallel::Workers;
use contactnet_core::graph::{write_edge_list, Graph, LabeledGraph};
use contactnet_core::metrics::{area_between, mean_curves, Quadrature};
use contactnet_core::seed::{derive_seed, stream};
use contactnet_core::sir::{run_stream, simulate_sir_from, SirParams, Trajectory};

#[derive(Parser)]
#[command(name = "contactnet", version, about = "Fit random-graph models to contact networks and compare epidemics on them")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    /// Pick from the file's header line.
    Auto,
    EdgeList,
    Contacts,
    Attendance,
}

#[derive(Clone, Copy, ValueEnum)]
enum QuadratureArg {
    Trapezoid,
    LeftRectangle,
}

#[derive(Subcommand)]
enum Command {
    /// Print summary statistics of a network.
    Stats {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "auto")]
        format: FormatArg,
        /// Emit JSON instead of a table.
        #[arg(long)]
        json: bool,
    },
    /// Fit a model to a network and write it as JSON.
    Fit {
        file: PathBuf,
        /// er, degree, sbm or dcsbm.
        #[arg(long)]
        model: String,
        /// exact_sum | chung_lu (degree), exact | paper (dcsbm).
        #[arg(long)]
        mode: Option<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Write the detected communities as `node_label,community_index`.
        #[arg(long)]
        partition_out: Option<PathBuf>,
        /// Fix the number of communities instead of using the eigengap.
        #[arg(long)]
        k: Option<usize>,
        /// Laplacian regularizer (default: average degree).
        #[arg(long)]
        tau: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "auto")]
        format: FormatArg,
    },
    /// Draw networks from a fitted model.
    Sample {
        model: PathBuf,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output directory for `sample_NNN.edges`.
        #[arg(short, long, default_value = ".")]
        output: PathBuf,
    },
    /// Run an SIR ensemble on a network or on networks sampled from a model file.
    Simulate {
        /// A dataset, or a `.json` model file.
        input: PathBuf,
        #[arg(long, default_value_t = 0.025)]
        beta: f64,
        #[arg(long, default_value_t = 0.025)]
        gamma: f64,
        #[arg(long, default_value_t = 30)]
        steps: usize,
        #[arg(long, default_value_t = 1000)]
        runs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Fixed initial infectious node labels (comma-separated); otherwise one
        /// node drawn uniformly per run.
        #[arg(long, value_delimiter = ',')]
        initial: Vec<String>,
        /// Sampled networks when the input is a model (runs are per network).
        #[arg(long, default_value_t = 1)]
        networks: usize,
        /// Mean-curve CSV; stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Also write every trajectory as `run,t,S,I,R`.
        #[arg(long)]
        trajectories: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "auto")]
        format: FormatArg,
    },
    /// Area between two mean-curve CSV files.
    Evaluate {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, value_enum, default_value = "trapezoid")]
        quadrature: QuadratureArg,
    },
    /// Run the full protocol from a JSON config.
    Experiment { config: PathBuf },
}

fn resolve_format(path: &Path, f: FormatArg) -> Result<DatasetFormat> {
    Ok(match f {
        FormatArg::Auto => DatasetFormat::sniff(path)?,
        FormatArg::EdgeList => DatasetFormat::EdgeList,
        FormatArg::Contacts => DatasetFormat::Contacts,
        FormatArg::Attendance => DatasetFormat::Attendance,
    })
}

fn load(path: &Path, f: FormatArg) -> Result<LabeledGraph> {
    io::read_dataset(path, resolve_format(path, f)?)
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(p) => io::write_text(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Stats { file, format, json } => {
            let summary = harness::dataset_stats(&file, resolve_format(&file, format)?)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&summary).expect("summary serializes"));
            } else {
                print!("{}", summary.render_text());
            }
            Ok(())
        }
        Command::Fit { file, model, mode, output, partition_out, k, tau, seed, format } => {
            let lg = load(&file, format)?;
            let mut spec = ModelSpec::new(parse_variant(&model)?);
            spec.mode = mode;
            spec.spectral.k_fixed = k;
            spec.spectral.tau = tau;
            spec.mode()?;
            let fitted = harness::fit_model(&lg.graph, &spec, seed, &mut PartitionCache::default())?;
            let report = fitted.fit_report(&lg.graph).context(|| "fit report".into())?;
            if let Some(p) = &partition_out {
                let partition = fitted
                    .partition()
                    .ok_or_else(|| CliError::Usage(format!("the {model} model has no communities")))?;
                io::write_text(p, &io::partition_csv(partition, &lg.labels))?;
            }
            let doc = ModelDocument::new(fitted, lg.labels);
            match &output {
                Some(p) => {
                    io::write_text(p, &doc.to_json())?;
                    eprintln!(
                        "{}: {} parameters, log-likelihood per pair {}, estimator {}{}",
                        report.variant.display_name(),
                        report.parameter_count,
                        report.log_likelihood_per_pair,
                        report.estimator,
                        if report.capped() { format!(", {} capped pairs", report.capped_pairs) } else { String::new() }
                    );
                }
                None => print!("{}", doc.to_json()),
            }
            Ok(())
        }
        Command::Sample { model, count, seed, output } => {
            let doc = ModelDocument::from_json(&model, &io::read_text(&model)?)?;
            for i in 0..count {
                let g = doc.model.sample_graph(&mut stream(seed, &[i as u64]));
                io::write_text(&output.join(format!("sample_{i:03}.edges")), &write_edge_list(&g))?;
            }
            Ok(())
        }
        Command::Simulate {
            input,
            beta,
            gamma,
            steps,
            runs,
            seed,
            initial,
            networks,
            output,
            trajectories,
            format,
        } => {
            let workers = Workers::from_env()?;
            if runs == 0 || networks == 0 {
                return Err(CliError::Usage("--runs and --networks must be at least 1".into()));
            }
            let mut params = SirParams {
                infection_probability: beta,
                recovery_probability: gamma,
                steps,
                initial_infectious: initial.len().max(1),
            };
            params.validate().map_err(|e| CliError::Usage(e.to_string()))?;
            let is_model = input.extension().is_some_and(|e| e == "json");
            let (graphs, labels, population): (Vec<Graph>, _, usize) = if is_model {
                let doc = ModelDocument::from_json(&input, &io::read_text(&input)?)?;
                let n = doc.model.n_nodes();
                let gs = (0..networks)
                    .map(|net| doc.model.sample_graph(&mut stream(seed, &[branch::SAMPLE, 0, net as u64])))
                    .collect();
                (gs, doc.labels, n)
            } else {
                if networks != 1 {
                    return Err(CliError::Usage("--networks applies only to model inputs".into()));
                }
                let lg = load(&input, format)?;
                let n = lg.graph.n_nodes();
                (vec![lg.graph], lg.labels, n)
            };
            let fixed: Option<Vec<usize>> = if initial.is_empty() {
                None
            } else {
                params.initial_infectious = initial.len();
                Some(
                    initial
                        .iter()
                        .map(|l| labels.get(l).ok_or_else(|| CliError::Usage(format!("unknown initial node `{l}`"))))
                        .collect::<Result<_>>()?,
                )
            };
            let mut all: Vec<Trajectory> = Vec::with_capacity(graphs.len() * runs);
            for (net, g) in graphs.iter().enumerate() {
                let ens_seed = if is_model {
                    derive_seed(seed, &[branch::MODEL_EPIDEMICS, 0, net as u64])
                } else {
                    derive_seed(seed, &[branch::ACTUAL])
                };
                let batch = match &fixed {
                    None => workers.simulate_ensemble(g, &params, runs, ens_seed)?,
                    Some(init) => workers
                        .map_indexed(runs, |r| simulate_sir_from(g, &params, init, &mut run_stream(ens_seed, r)))
                        .into_iter()
                        .collect::<contactnet_core::Result<_>>()
                        .context(|| "epidemic ensemble".into())?,
                };
                all.extend(batch);
            }
            let curves = mean_curves(&all, population).context(|| "mean curves".into())?;
            if let Some(p) = &trajectories {
                io::write_text(p, &io::trajectories_csv(&all, 0))?;
            }
            emit(output.as_deref(), &io::curves_csv(&curves))
        }
        Command::Evaluate { a, b, quadrature } => {
            let ca = io::parse_curves_csv(&a, &io::read_text(&a)?)?;
            let cb = io::parse_curves_csv(&b, &io::read_text(&b)?)?;
            let rule = match quadrature {
                QuadratureArg::Trapezoid => Quadrature::Trapezoid,
                QuadratureArg::LeftRectangle => Quadrature::LeftRectangle,
            };
            let area = area_between(&ca, &cb, rule).map_err(|e| CliError::Data(e.to_string()))?;
            println!("{area}");
            Ok(())
        }
        Command::Experiment { config } => {
            let cfg = ExperimentConfig::load(&config)?;
            let workers = Workers::from_env()?;
            let report = harness::run_experiment(&cfg, &workers)?;
            let summary: &DatasetSummary = &report.dataset.summary;
            println!(
                "{}: N = {}, M = {}; results in {}",
                report.dataset.name,
                summary.n_nodes,
                summary.n_edges,
                cfg.output_dir.display()
            );
            print!("{}", std::fs::read_to_string(cfg.output_dir.join("quality_table.txt")).unwrap_or_default());
            Ok(())
        }
    }
}
