//! The `jclattice` command line: `evolve`, `sweep`, `esd` and `verify`.
//!
//! Exit codes: 0 success, 1 usage error, 2 I/O error, 3 verification
//! failure or engine disagreement.

mod commands;
pub mod config;
mod output;
pub mod verify;

use std::ffi::OsString;
use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use config::RunConfig;

use crate::dynamics::FamilyKind;
use crate::esd::EngineSelector;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, message: message.into() }
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self { code: EXIT_IO, message: message.into() }
    }

    pub fn verify(message: impl Into<String>) -> Self {
        Self { code: EXIT_VERIFY, message: message.into() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<crate::Error> for CliError {
    fn from(e: crate::Error) -> Self {
        match e {
            crate::Error::InvalidParameter(_) => CliError::usage(e.to_string()),
            other => CliError::verify(other.to_string()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Phi,
    Psi,
}

impl From<FamilyArg> for FamilyKind {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Phi => FamilyKind::Phi,
            FamilyArg::Psi => FamilyKind::Psi,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EngineArg {
    Analytic,
    Numeric,
    /// Analytic values, cross-checked against the numeric engine.
    Both,
    ClosedForm,
}

impl EngineArg {
    /// The engine whose values are reported.
    fn primary(self) -> EngineSelector {
        match self {
            EngineArg::Analytic | EngineArg::Both => EngineSelector::Analytic,
            EngineArg::Numeric => EngineSelector::Numeric,
            EngineArg::ClosedForm => EngineSelector::ClosedForm,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

#[derive(Parser, Debug)]
#[command(name = "jclattice", version, about = "Pairwise entanglement of two Jaynes-Cummings sites")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Concurrence time series of all six pairs.
    Evolve(CommonArgs),
    /// Concurrence over an (alpha, t) grid in long format.
    Sweep(CommonArgs),
    /// Zero intervals of every pair's concurrence, as JSON.
    Esd(CommonArgs),
    /// Run the invariant checks and report pass/fail.
    Verify(VerifyArgs),
}

/// Flags shared by all subcommands. Unset flags fall back to the config
/// file, then to built-in defaults.
#[derive(Args, Debug, Default, Clone)]
pub struct CommonArgs {
    /// `key = value` file overriding the defaults.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub family: Option<FamilyArg>,
    /// Initial-state angle in radians.
    #[arg(long, allow_negative_numbers = true, conflicts_with = "alpha_deg")]
    pub alpha: Option<f64>,
    /// Initial-state angle in degrees.
    #[arg(long, allow_negative_numbers = true)]
    pub alpha_deg: Option<f64>,
    /// Atomic transition frequency.
    #[arg(long)]
    pub omega0: Option<f64>,
    /// Cavity frequency.
    #[arg(long)]
    pub omega: Option<f64>,
    /// Atom-cavity coupling; the Rabi frequency is G = 2g.
    #[arg(long)]
    pub g: Option<f64>,
    /// Photon cutoff of the numeric engine.
    #[arg(long)]
    pub n_max: Option<usize>,
    /// End of the time window (default 4 pi / G).
    #[arg(long)]
    pub t_max: Option<f64>,
    /// Number of time steps; the grid has steps + 1 points.
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long, value_enum)]
    pub engine: Option<EngineArg>,
    /// Concurrences at or below this count as zero.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Largest accepted analytic/numeric difference with `--engine both`.
    #[arg(long)]
    pub agreement_tol: Option<f64>,
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    /// Output file (default stdout).
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Sweep: smallest alpha in radians.
    #[arg(long, allow_negative_numbers = true)]
    pub alpha_min: Option<f64>,
    /// Sweep: largest alpha in radians.
    #[arg(long, allow_negative_numbers = true)]
    pub alpha_max: Option<f64>,
    /// Sweep: number of alpha steps; the grid has alpha-steps + 1 points.
    #[arg(long)]
    pub alpha_steps: Option<usize>,
    /// ESD: samples per Rabi period before refinement.
    #[arg(long)]
    pub samples_per_period: Option<usize>,
    /// ESD: minimum sudden-death width in Rabi periods.
    #[arg(long)]
    pub min_width: Option<f64>,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Emit the report as JSON.
    #[arg(long)]
    pub json: bool,
    /// Add this amount to one coupling entry of the numeric Hamiltonian.
    #[arg(long, allow_negative_numbers = true)]
    pub inject_fault: Option<f64>,
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.code
        }
    }
}

fn dispatch(command: &Command) -> Result<(), CliError> {
    match command {
        Command::Evolve(a) => commands::evolve(&RunConfig::resolve(a)?),
        Command::Sweep(a) => commands::sweep(&RunConfig::resolve(a)?),
        Command::Esd(a) => commands::esd(&RunConfig::resolve(a)?),
        Command::Verify(a) => commands::verify(&RunConfig::resolve(&a.common)?, a.json, a.inject_fault),
    }
}
