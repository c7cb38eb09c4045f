//! `fracblow <mode> --config <path> [--out <dir>] [--seed <u64>]`
//!
//! Exit codes: 0 on clean completion (verdicts are data, not exit status),
//! 2 on configuration or validation errors.

mod commands;
mod config;

use clap::Parser;
use config::{ExperimentConfig, Mode};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(
    name = "fracblow",
    about = "Blow-up laboratory for weakly coupled systems with two fractional diffusions",
    version
)]
struct Cli {
    /// Execution mode; must match the `mode` field of the config file.
    #[arg(value_enum)]
    mode: Mode,
    /// Path to the JSON experiment config.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides the config's `output_dir`; default ".").
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed recorded in all outputs for reproducibility bookkeeping.
    #[arg(long)]
    seed: Option<u64>,
}

fn init_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var("FRACBLOW_THREADS") {
        let n: usize = v
            .parse()
            .map_err(|_| anyhow::anyhow!("FRACBLOW_THREADS must be a positive integer, got {v:?}"))?;
        if n == 0 {
            anyhow::bail!("FRACBLOW_THREADS must be >= 1");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| anyhow::anyhow!("cannot configure thread pool: {e}"))?;
    }
    Ok(())
}

fn run(cli: &Cli) -> anyhow::Result<()> {
    init_threads()?;
    let cfg = ExperimentConfig::from_file(&cli.config)?;
    if cfg.mode != cli.mode {
        anyhow::bail!(
            "mode mismatch: command line says '{}', config says '{}'",
            cli.mode,
            cfg.mode
        );
    }
    let out = cli
        .out
        .clone()
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    commands::dispatch(&cfg, cli.mode, &out, cli.seed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
