//! Parameter sweeps, CSV output and validation suites for `fadingcap`.

pub mod commands;
pub mod config;
pub mod table;
pub mod validate;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use thiserror::Error;

use crate::commands::{BoundsArgs, CtArgs, MiArgs, PredictArgs};
use crate::config::CommonArgs;
use crate::validate::Suite;

/// Worker count override for the sweep thread pool.
pub const THREADS_ENV: &str = "FADINGCAP_THREADS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Model(#[from] fadingcap::Error),
    #[error("{failed} of {total} checks failed")]
    Validation { failed: usize, total: usize },
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation { .. } => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "fadingcap",
    version,
    about = "Low-SNR capacity bounds for correlated Rayleigh fading"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate U, U_pred, C_u, L_n, f(beta) rho^2 and theta over the rho grid.
    Bounds(BoundsArgs),
    /// U / rho^2 and L_n / rho^2 against f(beta).
    Asymptote(CommonArgs),
    /// Run a named check suite and report PASS/FAIL per check.
    Validate {
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Quadratic low-SNR mutual information of block on-off inputs.
    Mi(MiArgs),
    /// Finite-window and asymptotic prediction errors.
    Predict(PredictArgs),
    /// lambda_n, duty cycle and rate coefficient of the on-off scheme.
    Lowerbound(CommonArgs),
    /// Continuous-time wideband capacity.
    Ct(CtArgs),
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = raw.trim().parse().map_err(|_| {
        CliError::Usage(format!(
            "{THREADS_ENV} must be a positive integer, got `{raw}`"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Usage(e.to_string()))
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    match cli.command {
        Command::Bounds(args) => commands::bounds(&args),
        Command::Asymptote(args) => commands::asymptote(&args),
        Command::Validate { suite, common } => validate::run(suite, &common),
        Command::Mi(args) => commands::mi(&args),
        Command::Predict(args) => commands::predict(&args),
        Command::Lowerbound(args) => commands::lowerbound(&args),
        Command::Ct(args) => commands::ct(&args),
    }
}

/// Parses `args`, runs the command and maps the outcome to an exit code.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
