//! `plaseries`: run syntheses, constructions and decompositions, and re-verify
//! their artifacts.

mod config;
mod jobs;
mod output;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::Config;
use crate::output::CliError;

#[derive(Parser)]
#[command(version, about = "Polynomial constructions with certified maximal partial-sum control")]
struct Cli {
    /// TOML configuration; omitted keys take their documented defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides `seed` from the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides the sampling grid `grid` from the configuration.
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// Artifact directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Also fail when a clause passes only by more than half its slack.
    #[arg(long, global = true)]
    strict: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Flat polynomial synthesis.
    Synth,
    /// Indicator polynomial for an arc.
    Indicator,
    /// Step polynomial with maximal-function control on a set.
    Steppoly,
    /// (P, Q) pair for a step function.
    Pqpair,
    /// Decomposition with uniformly small correctors.
    Decompose,
    /// Decomposition with correctors small in the U-norm.
    Menshov,
    /// Modulated translate averages against their coefficient tail bounds.
    DensityDemo,
    /// Re-check an artifact directory written by any other subcommand.
    Verify { dir: PathBuf },
}

fn load_config(cli: &Cli) -> Result<Config, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            Config::parse(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?
        }
        None => Config::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(grid) = cli.grid {
        cfg.grid = grid;
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<(), CliError> {
    if let Command::Verify { dir } = &cli.command {
        return verify::run(dir, cli.strict);
    }
    let cfg = load_config(cli)?;
    let outcome = match cli.command {
        Command::Synth => jobs::synth(&cfg, &cli.out),
        Command::Indicator => jobs::indicator(&cfg, &cli.out),
        Command::Steppoly => jobs::steppoly(&cfg, &cli.out),
        Command::Pqpair => jobs::pqpair(&cfg, &cli.out),
        Command::Decompose => jobs::decompose(&cfg, &cli.out, false),
        Command::Menshov => jobs::decompose(&cfg, &cli.out, true),
        Command::DensityDemo => jobs::density(&cfg, &cli.out),
        Command::Verify { .. } => unreachable!(),
    }?;
    outcome.finish(cli.strict)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.code())
        }
    }
}
