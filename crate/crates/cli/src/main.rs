use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod config;
mod report;

use config::{RawConfig, RunConfig};

/// Verification runs for residue-class shifts on weighted Bergman spaces.
#[derive(Parser)]
#[command(name = "bqs", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo check of the monomial norms for |k| <= D.
    Moments(RawConfig),
    /// Intertwining residuals of X_j and Y_j over every class.
    Intertwine(RawConfig),
    /// Factorization, bounds, diagonal limits and liminf sweep of c_kj.
    Asymptotics(RawConfig),
    /// Residue-class decomposition of the degree-D truncation.
    Decompose(RawConfig),
}

pub enum Failure {
    Config(String),
    Io(std::io::Error),
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

impl From<String> for Failure {
    fn from(e: String) -> Self {
        Failure::Config(e)
    }
}

fn init_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("BQS_THREADS") else {
        return Ok(());
    };
    let count: usize = v
        .trim()
        .parse()
        .map_err(|_| Failure::Config(format!("BQS_THREADS must be a nonnegative integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(count)
        .build_global()
        .map_err(|e| Failure::Config(e.to_string()))
}

fn run(cli: Cli) -> Result<bool, Failure> {
    init_threads()?;
    match cli.command {
        Command::Moments(raw) => commands::moments(RunConfig::resolve("moments", raw)?),
        Command::Intertwine(raw) => commands::intertwine(RunConfig::resolve("intertwine", raw)?),
        Command::Asymptotics(raw) => commands::asymptotics(RunConfig::resolve("asymptotics", raw)?),
        Command::Decompose(raw) => commands::decompose(RunConfig::resolve("decompose", raw)?),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
