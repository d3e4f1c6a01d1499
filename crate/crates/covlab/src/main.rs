//! `covlab` CLI: run experiment configs, validate them, and list the
//! experiment kinds. Exit codes: 0 success, 2 invalid config or arguments,
//! 3 runtime failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use covlab::harness::{ExperimentConfig, ExperimentKind, OutputFormat};
use covlab::{CovlabError, Result};

#[derive(Parser)]
#[command(name = "covlab", version, about = "Coverage-process laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment config and write its output file.
    Run {
        /// Path to the experiment config.
        #[arg(long)]
        config: PathBuf,
        /// Override the config's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the config's replicate count.
        #[arg(long)]
        replicates: Option<u64>,
        /// Override the output path.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the output format (csv or json).
        #[arg(long)]
        format: Option<String>,
    },
    /// Parse and validate a config without running it.
    Validate {
        /// Path to the experiment config.
        #[arg(long)]
        config: PathBuf,
    },
    /// List the experiment kinds this binary can run.
    ListExperiments,
}

/// Honor COVLAB_THREADS by capping the global worker pool before any
/// parallel work starts.
fn init_thread_pool() -> Result<()> {
    let Ok(raw) = std::env::var("COVLAB_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw.parse().map_err(|_| {
        CovlabError::invalid("COVLAB_THREADS", format!("expected a positive integer, got `{raw}`"))
    })?;
    if threads == 0 {
        return Err(CovlabError::invalid("COVLAB_THREADS", "thread count must be at least 1"));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CovlabError::Unsupported(format!("thread pool init failed: {e}")))
}

fn load_config(
    path: &PathBuf,
    seed: Option<u64>,
    replicates: Option<u64>,
    out: Option<PathBuf>,
    format: Option<String>,
) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::from_path(path)?;
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    if let Some(replicates) = replicates {
        cfg.replicates = replicates;
    }
    if let Some(out) = out {
        cfg.out = Some(out);
    }
    if let Some(format) = format {
        let format = OutputFormat::from_name(&format)?;
        if format == OutputFormat::Csv && !cfg.kind.supports_csv() {
            return Err(CovlabError::invalid(
                "format",
                format!("experiment `{}` emits a verdict only; use json", cfg.kind.name()),
            ));
        }
        cfg.format = format;
    }
    Ok(cfg)
}

fn real_main(cli: Cli) -> Result<()> {
    init_thread_pool()?;
    match cli.command {
        Command::Run { config, seed, replicates, out, format } => {
            let cfg = load_config(&config, seed, replicates, out, format)?;
            let path = cfg.run_to_files()?;
            println!("{} {} -> {}", cfg.kind.name(), cfg.config_hash(), path.display());
        }
        Command::Validate { config } => {
            let cfg = ExperimentConfig::from_path(&config)?;
            println!("ok {} {}", cfg.config_hash(), cfg.canonical());
        }
        Command::ListExperiments => {
            let width = ExperimentKind::ALL.iter().map(|k| k.name().len()).max().unwrap_or(0);
            for kind in ExperimentKind::ALL {
                println!("{:width$}  {}", kind.name(), kind.description());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match real_main(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                ExitCode::from(2)
            } else {
                ExitCode::from(3)
            }
        }
    }
}
