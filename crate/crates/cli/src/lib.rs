//! Command-line front end: matrix sources, the three solvers, refinement and
//! the Monte-Carlo experiments.

pub mod commands;
pub mod experiments;
pub mod io;
pub mod stats;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use eigenpath::EigenError;
use serde::Serialize;

pub use experiments::Experiment;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_BUDGET: i32 = 4;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numerical(EigenError),
}

impl From<EigenError> for CliError {
    fn from(e: EigenError) -> Self {
        match e {
            EigenError::Argument(msg) => Self::Usage(msg),
            EigenError::ShapeMismatch { .. } => Self::Usage(e.to_string()),
            other => Self::Numerical(other),
        }
    }
}

#[derive(Serialize)]
struct ErrorReport<'a> {
    error: &'a str,
    message: String,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => EXIT_USAGE,
            Self::Numerical(EigenError::BudgetExceeded { .. }) => EXIT_BUDGET,
            Self::Numerical(_) => EXIT_NUMERICAL,
        }
    }

    /// One-line JSON `{"error": kind, "message": ...}` for stderr.
    pub fn to_json(&self) -> String {
        let report = match self {
            Self::Usage(msg) => ErrorReport {
                error: "argument",
                message: msg.clone(),
            },
            Self::Numerical(e) => ErrorReport {
                error: e.kind(),
                message: e.to_string(),
            },
        };
        serde_json::to_string(&report).expect("error report serializes")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "eigenpath", version, about = "Certified eigenpairs by homotopy continuation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Options,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// One eigenpair, tracked from diag(1, 0, ..., 0).
    SolveOne,
    /// All eigenpairs, tracked from the hexagonal lattice diagonal.
    SolveAll,
    /// One eigenpair, tracked from a random initial triple.
    SolveRandom,
    /// Refine an eigenpair to relative accuracy --epsilon.
    Refine,
    /// Run a Monte-Carlo experiment family.
    Bench,
}

#[derive(Debug, Args)]
pub struct Options {
    /// Matrix size; a comma-separated list for bench.
    #[arg(long, global = true, value_delimiter = ',')]
    pub n: Vec<usize>,
    #[arg(long, global = true)]
    pub trials: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Standard deviation of generated Gaussian matrices.
    #[arg(long, global = true, default_value_t = 1.0)]
    pub sigma: f64,
    /// Mean of generated Gaussian matrices (matrix file).
    #[arg(long, global = true)]
    pub center: Option<PathBuf>,
    #[arg(long, global = true)]
    pub epsilon: Option<f64>,
    /// Input matrix (JSON or EIGP binary). Without it a Gaussian matrix is generated.
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Starting pair for refine (JSON with `zeta` and `w`).
    #[arg(long, global = true)]
    pub pair: Option<PathBuf>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    #[arg(long, global = true, value_enum)]
    pub experiment: Option<Experiment>,
    /// Per-path step budget; exceeding it exits with code 4.
    #[arg(long, global = true)]
    pub max_steps: Option<u64>,
    /// Include the per-step homotopy trace in solver output.
    #[arg(long, global = true)]
    pub trace: bool,
}

/// Parses `args`, runs the command and returns the process exit code.
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
    match commands::dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{}", e.to_json());
            e.exit_code()
        }
    }
}
