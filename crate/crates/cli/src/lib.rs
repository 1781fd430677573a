//! Command line front end: classification, fiber analysis, constants, solves,
//! sweeps and bubble rates driven by a TOML config.

pub mod commands;
pub mod config;
pub mod output;
pub mod svg;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use kirchhoff_core::Error;

#[derive(Debug, Parser)]
#[command(name = "kirchhoff", version, about = "Critical Kirchhoff problem toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML run configuration.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory (created if missing).
    #[arg(long, global = true, value_name = "DIR", default_value = ".")]
    pub out: PathBuf,
    /// Worker threads for sweeps.
    #[arg(long, global = true, value_name = "K")]
    pub jobs: Option<usize>,
    /// Continue an interrupted sweep.
    #[arg(long, global = true)]
    pub resume: bool,
    /// Solve even where nonexistence is proven.
    #[arg(long, global = true)]
    pub force: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Classify one parameter point.
    Classify,
    /// Sample a fiber map and list its Nehari points.
    Fiber,
    /// sigma_1, S and S_q of a ball.
    Constants,
    /// Minimise the energy over N-.
    Solve,
    /// Region map over a (b, mu) rectangle.
    Sweep,
    /// Convergence rates of truncated bubbles.
    Bubble,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }

    /// 0 ok, 2 config, 3 inconsistency, 4 no convergence, 5 I/O,
    /// 6 mathematical precondition, 7 refused without `--force`.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io { .. } => 5,
            CliError::Core(e) => match e {
                Error::InvalidParams(_) | Error::Geometry(_) => 2,
                Error::Inconsistent { .. } | Error::InvariantViolation { .. } => 3,
                Error::Stagnation { .. } | Error::NoConvergence { .. } => 4,
                Error::Domain(_)
                | Error::WrongBranch(_)
                | Error::Precondition(_)
                | Error::D1Violation { .. }
                | Error::NoPeak
                | Error::ProjectionFailure { .. } => 6,
                Error::Refused { .. } => 7,
            },
        }
    }
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let cfg = match &cli.config {
        Some(p) => config::RunConfig::load(p)?,
        None => return Err(CliError::Config("--config is required".into())),
    };
    if cli.jobs == Some(0) {
        return Err(CliError::Config("--jobs must be at least 1".into()));
    }
    match cli.command {
        Command::Classify => commands::classify(&cfg, &cli.out),
        Command::Fiber => commands::fiber(&cfg, &cli.out),
        Command::Constants => commands::constants(&cfg, &cli.out),
        Command::Solve => commands::solve(&cfg, &cli.out, cli.force),
        Command::Sweep => commands::sweep(&cfg, &cli.out, cli.jobs, cli.resume),
        Command::Bubble => commands::bubble(&cfg, &cli.out),
    }
}
