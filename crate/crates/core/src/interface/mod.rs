//! Command line and live session service.
//!
//! ```text
//! xgl generate --seed 7 --out data.csv
//! xgl run --strategy xgl,gl,al,random,passive --seed 0 --out results.csv
//! xgl plot --input results.csv --seed 0 --out plots/
//! xgl serve --port 8080
//! ```
//!
//! `run` and `plot` take the same configuration flags; plotting a CSV with the
//! configuration that produced it writes the same files as `run` does.

pub mod server;
pub mod session;

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, CommandFactory, Parser, Subcommand};

use crate::engine::output::{emit_outputs, read_results_csv, render_plots, summary_report};
use crate::engine::{run_experiment, ExperimentConfig};
use crate::error::Result;
use crate::strategies::{StrategyKind, Theta};
use crate::synthdata::generate_synthetic;

pub use session::{LabelRequest, PoolPoint, SessionService, SessionView};

#[derive(Debug, Parser)]
#[command(name = "xgl", version, about = "Explanatory guided learning workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct ConfigArgs {
    /// JSON run configuration; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long)]
    folds: Option<usize>,
    /// Number of explanation clusters.
    #[arg(long)]
    k: Option<usize>,
}

impl ConfigArgs {
    fn load(&self) -> Result<ExperimentConfig> {
        let mut config = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(seed) = self.seed {
            config.seed = seed;
        }
        if let Some(budget) = self.budget {
            config.budget = budget;
            config.snapshot_iterations.retain(|&t| t <= budget);
        }
        if let Some(folds) = self.folds {
            config.folds = folds;
        }
        if let Some(k) = self.k {
            config.k_clusters = k;
        }
        config.validate()?;
        Ok(config)
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write the synthetic dataset as CSV (x1,x2,label).
    Generate {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long, default_value = "dataset.csv")]
        out: PathBuf,
    },
    /// Run cross-validated experiments and write the per-iteration CSV.
    Run {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Comma-separated strategies: al, gl, random, xgl, passive.
        #[arg(long, value_delimiter = ',')]
        strategy: Vec<StrategyKind>,
        /// XGL supervisor temperature: a non-negative number or `argmax`.
        /// A comma-separated list runs XGL once per value.
        #[arg(long, value_delimiter = ',')]
        theta: Vec<Theta>,
        #[arg(long, default_value = "results.csv")]
        out: PathBuf,
        /// Plot directory; defaults to `<out stem>_plots` beside the CSV.
        #[arg(long)]
        plots: Option<PathBuf>,
        #[arg(long)]
        no_plots: bool,
    },
    /// Render SVG plots and a summary from a results CSV.
    Plot {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long, default_value = "results.csv")]
        input: PathBuf,
        #[arg(long, default_value = "plots")]
        out: PathBuf,
    },
    /// Serve the live XGL session over HTTP.
    Serve {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: std::net::IpAddr,
    },
}

fn default_plot_dir(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "results".into());
    out.with_file_name(format!("{stem}_plots"))
}

fn execute(command: Command) -> Result<()> {
    match command {
        Command::Generate { cfg, out } => {
            let config = cfg.load()?;
            let dataset = generate_synthetic(&config.synthetic_config())?;
            dataset.save(&out)?;
            let counts = dataset.counts();
            eprintln!("wrote {} ({} red, {} blue)", out.display(), counts.red, counts.blue);
        }
        Command::Run {
            cfg,
            strategy,
            theta,
            out,
            plots,
            no_plots,
        } => {
            let base = cfg.load()?;
            let strategies = if strategy.is_empty() { vec![base.strategy] } else { strategy };
            let thetas = if theta.is_empty() { vec![base.theta] } else { theta };
            let mut configs = Vec::new();
            for &s in &strategies {
                if s.uses_theta() {
                    configs.extend(thetas.iter().map(|&t| ExperimentConfig {
                        strategy: s,
                        theta: t,
                        ..base.clone()
                    }));
                } else {
                    configs.push(ExperimentConfig {
                        strategy: s,
                        ..base.clone()
                    });
                }
            }
            let dataset = generate_synthetic(&base.synthetic_config())?;
            let mut results = Vec::new();
            for config in &configs {
                eprintln!("running {} over {} folds", config.strategy, config.folds);
                results.push(run_experiment(config, &dataset)?);
            }
            let plot_dir = (!no_plots).then(|| plots.unwrap_or_else(|| default_plot_dir(&out)));
            let written = emit_outputs(&results, &dataset, &out, plot_dir.as_deref())?;
            let tables = crate::engine::output::curve_tables(&results);
            print!("{}", summary_report(&tables));
            for path in written {
                eprintln!("wrote {}", path.display());
            }
        }
        Command::Plot { cfg, input, out } => {
            let config = cfg.load()?;
            let dataset = generate_synthetic(&config.synthetic_config())?;
            let tables = read_results_csv(std::fs::File::open(&input)?)?;
            for path in render_plots(&config, &dataset, &tables, &out)? {
                eprintln!("wrote {}", path.display());
            }
        }
        Command::Serve { cfg, port, host } => {
            let config = cfg.load()?;
            let service = Arc::new(SessionService::with_config(&config)?);
            let runtime = tokio::runtime::Builder::new_multi_thread().enable_all().build()?;
            runtime.block_on(async move {
                let listener = tokio::net::TcpListener::bind((host, port)).await?;
                eprintln!("session service listening on http://{}", listener.local_addr()?);
                server::serve(listener, service).await
            })?;
        }
    }
    Ok(())
}

/// Usage line of the subcommand named in `argv`, or of the whole tool.
fn usage_for(argv: &[OsString]) -> clap::builder::StyledStr {
    let mut cmd = Cli::command();
    cmd.build();
    let sub = argv.get(1).and_then(|a| a.to_str()).map(str::to_owned);
    match sub.and_then(|name| cmd.find_subcommand_mut(&name).cloned()) {
        Some(mut sub) => sub.render_usage(),
        None => cmd.render_usage(),
    }
}

/// Parses `argv` (including the program name) and runs the subcommand.
/// Returns the process exit code: 0 on success, 2 for usage errors and 1 for
/// runtime failures.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() && !e.to_string().contains("Usage:") {
                eprintln!("\n{}", usage_for(&argv));
            }
            return e.exit_code();
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
