//! `qlut`: reports, sweeps, exports and Monte Carlo runs for quantum lookup tables.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qlut_core::{Decomposition, QlutError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("validation error: {0}")]
    Validation(String),
    #[error("invariant violation: {0}")]
    Invariant(String),
    #[error("I/O error: {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl From<QlutError> for CliError {
    fn from(e: QlutError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } => 1,
            CliError::Config(_) => 2,
            CliError::Validation(_) => 3,
            CliError::Invariant(_) => 4,
        }
    }
}

#[derive(Parser)]
#[command(name = "qlut", version, about = "Quantum lookup-table circuits, layouts, noise and costs")]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
pub struct GlobalOpts {
    /// Charge each tree hop ⌈log₂ m⌉ steps of distillation in the schedule.
    #[arg(long, global = true)]
    include_distillation_depth: bool,
    /// T gates per CSWAP and CCNOT; overrides the config.
    #[arg(long, global = true, value_enum)]
    decomposition: Option<DecompositionArg>,
}

#[derive(ValueEnum, Clone, Copy)]
enum DecompositionArg {
    T7,
    T4,
}

impl GlobalOpts {
    fn decomposition(&self) -> Option<Decomposition> {
        self.decomposition.map(|d| match d {
            DecompositionArg::T7 => Decomposition::T7,
            DecompositionArg::T4 => Decomposition::T4,
        })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Costs, infidelity, layout summary and (for small N) simulation of one instance.
    Report {
        #[arg(long)]
        config: PathBuf,
        /// Also write the report as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exponent table over the (d/n, d'/n) grid; writes table.csv and table.json.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Writes the gate list, one gate per line.
    ExportGates {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Writes layout.json, layout.txt and links.csv into a directory.
    ExportLayout {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Monte Carlo infidelity; optionally logs every trial as JSON lines.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        log: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let g = cli.global;
    match cli.command {
        Command::Report { config, out } => commands::report(&config, out.as_deref(), g),
        Command::Sweep { config, out } => commands::sweep(&config, &out),
        Command::ExportGates { config, out } => commands::export_gates(&config, &out, g),
        Command::ExportLayout { config, out } => commands::export_layout(&config, &out, g),
        Command::Simulate { config, trials, seed, log } => commands::simulate(&config, trials, seed, log.as_deref()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qlut: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
