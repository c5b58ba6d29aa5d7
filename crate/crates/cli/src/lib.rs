//! Command-line front end: configuration loading, argument parsing and the
//! `classify`, `grid`, `report`, `twoband` and `probe` commands.
//!
//! Exit codes: 0 success, 2 configuration or argument error, 3 unresolved
//! point, 4 I/O error, 5 two-band condition not found, 6 singular pivot.

pub mod args;
pub mod commands;
pub mod config;

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use finespec::{Complex64, Window};

pub use commands::{CliError, Exit};
pub use config::{load_config, parse_config, ConfigError, RunConfig};

#[derive(Debug, Parser)]
#[command(
    name = "finespec",
    version,
    about = "Fine spectrum of lower-bidiagonal difference operators"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify a single point.
    Classify {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_parser = args::parse_lambda, allow_hyphen_values = true)]
        lambda: Complex64,
    },
    /// Classify a rectangular grid and write CSV.
    Grid {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_parser = args::parse_window, allow_hyphen_values = true)]
        window: Window,
        #[arg(long, value_parser = args::parse_resolution)]
        res: (usize, usize),
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the structured spectrum report.
    Report {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Scan the period-2 two-band inequality.
    Twoband {
        #[arg(long)]
        config: PathBuf,
        #[arg(long = "R", allow_hyphen_values = true)]
        r: Option<f64>,
        #[arg(long = "k-range", value_parser = args::parse_k_range)]
        k_range: Option<(usize, usize)>,
    },
    /// Power-iteration estimate of the inverse norm of a finite section.
    Probe {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_parser = args::parse_lambda, allow_hyphen_values = true)]
        lambda: Complex64,
        #[arg(long, default_value_t = 200)]
        n: usize,
    },
}

impl Command {
    fn config_path(&self) -> &PathBuf {
        match self {
            Command::Classify { config, .. }
            | Command::Grid { config, .. }
            | Command::Report { config, .. }
            | Command::Twoband { config, .. }
            | Command::Probe { config, .. } => config,
        }
    }
}

pub fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<Exit, CliError> {
    let cfg = load_config(cli.command.config_path())?;
    match &cli.command {
        Command::Classify { lambda, .. } => commands::cmd_classify(&cfg, *lambda, stdout),
        Command::Grid {
            window, res, out, ..
        } => commands::cmd_grid(&cfg, *window, *res, out.as_deref(), stdout),
        Command::Report { out, .. } => commands::cmd_report(&cfg, out.as_deref(), stdout),
        Command::Twoband { r, k_range, .. } => commands::cmd_twoband(&cfg, *r, *k_range, stdout),
        Command::Probe { lambda, n, .. } => commands::cmd_probe(&cfg, *lambda, *n, stdout),
    }
}

/// Runs a parsed command line, reporting errors on `stderr`.
pub fn run(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    match execute(cli, stdout) {
        Ok(exit) => exit.code(),
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit().code()
        }
    }
}
