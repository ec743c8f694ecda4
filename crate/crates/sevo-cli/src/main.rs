//! `sevolab`: decay-rate tables, phase diagrams, and verification runs for
//! weakly coupled structurally damped sigma-evolution systems.
//!
//! Exit codes: 0 when the command passed, 2 when a verification produced a
//! failing verdict, 1 for configuration or runtime errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod config;

use config::{cfg_err, CliError, CommandKind};

#[derive(Parser)]
#[command(
    name = "sevolab",
    version,
    about = "Decay rates, existence regions, and numerical verification for damped sigma-evolution systems"
)]
struct Cli {
    /// Experiment description (TOML).
    #[arg(long, value_name = "PATH", global = true)]
    config: Option<PathBuf>,
    /// Output root; overrides `out_dir` from the config file.
    #[arg(long, value_name = "DIR", global = true)]
    out: Option<PathBuf>,
    /// Worker threads for sweeps and verification matrices.
    #[arg(long, value_name = "K", global = true)]
    workers: Option<usize>,
    /// Seed for sampled checks; overrides `seed` from the config file.
    #[arg(long, value_name = "INT", global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Print and save the predicted decay-rate table.
    Rates,
    /// Evaluate theorem regions on a (p, q) grid and save a phase-diagram CSV.
    Regions,
    /// Integrate a semilinear system and record scheduled norms.
    Simulate,
    /// Measure blow-up time against data size and fit the lifespan slope.
    SweepLifespan,
    /// Run the linear decay-rate verification matrix.
    VerifyLinear,
    /// Run kernel-scaling, small-frequency, and interpolation checks.
    VerifyLemmas,
    /// Aggregate report.json files from earlier runs.
    Report,
}

impl From<Command> for CommandKind {
    fn from(c: Command) -> CommandKind {
        match c {
            Command::Rates => CommandKind::Rates,
            Command::Regions => CommandKind::Regions,
            Command::Simulate => CommandKind::Simulate,
            Command::SweepLifespan => CommandKind::SweepLifespan,
            Command::VerifyLinear => CommandKind::VerifyLinear,
            Command::VerifyLemmas => CommandKind::VerifyLemmas,
            Command::Report => CommandKind::Report,
        }
    }
}

fn run(cli: Cli) -> Result<bool, CliError> {
    if let Some(k) = cli.workers {
        if k == 0 {
            return Err(cfg_err("--workers", "must be at least 1"));
        }
        // Only the first initialization wins; fine for a one-shot process.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global();
    }
    let path = cli
        .config
        .ok_or_else(|| cfg_err("--config", "a config file is required"))?;
    let raw = config::load(&path)?;
    let resolved = config::resolve(raw, cli.command.map(Into::into), cli.out, cli.seed)?;
    commands::dispatch(&resolved)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("verification failed");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            let mut src = std::error::Error::source(&e);
            while let Some(s) = src {
                eprintln!("  caused by: {s}");
                src = s.source();
            }
            ExitCode::from(1)
        }
    }
}
