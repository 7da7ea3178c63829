#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

mod commands;
mod config;
mod error;
mod output;

use config::Config;
use error::CliError;
use output::{Output, RunManifest, MANIFEST_NAME};

#[derive(Parser)]
#[command(name = "bolab", version, about = "Benjamin-Ono numerical lab")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Experiment config (`key = value` lines).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,

    /// Worker threads, 0 for one per core.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Sample a soliton family: profile.csv.
    Soliton,
    /// Evaluate the multisoliton formula: exact.csv, diagnostics.csv.
    Exact,
    /// Discretised Lax spectrum: spectrum.csv, trace.json.
    Spectrum,
    /// Distorted Fourier coefficients: zeta.csv, radiation.csv.
    Scatter,
    /// Pseudo-spectral evolution: snapshots and manifest.json.
    Evolve,
    /// Error curves and bounds: errors.csv, bounds.csv, fit.json.
    Resolve,
    /// Decay fit of an error table: fit.json.
    Fit,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Soliton => "soliton",
            Command::Exact => "exact",
            Command::Spectrum => "spectrum",
            Command::Scatter => "scatter",
            Command::Evolve => "evolve",
            Command::Resolve => "resolve",
            Command::Fit => "fit",
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let start = Instant::now();
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Config("--config is required".into()))?;
    let cfg = Config::load(path)?;
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .map_err(|e| CliError::Config(format!("cannot start {} threads: {e}", cli.threads)))?;
    }
    let mut out = Output::new(&cli.out)?;
    match cli.command {
        Command::Soliton => commands::soliton(&cfg, &mut out)?,
        Command::Exact => commands::exact(&cfg, &mut out)?,
        Command::Spectrum => commands::spectrum(&cfg, &mut out)?,
        Command::Scatter => commands::scatter(&cfg, &mut out)?,
        Command::Evolve => commands::evolve(&cfg, &mut out)?,
        Command::Resolve => commands::resolve(&cfg, &mut out)?,
        Command::Fit => commands::fit(&cfg, &mut out)?,
    }
    let manifest = RunManifest {
        command: cli.command.name().to_string(),
        config: cfg.resolved(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        duration_seconds: start.elapsed().as_secs_f64(),
        outputs: out.files().to_vec(),
    };
    out.json(MANIFEST_NAME, &manifest)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("bolab {}: {e}", cli.command.name());
            ExitCode::from(e.exit_code())
        }
    }
}
