//! Command-line front end for `qdecay-core`.
//!
//! Exit codes: 0 success, 1 invalid input, 2 a numerical hypothesis guard
//! fired (radius, amplification, evaluation limit), 3 `verify` found a
//! failing check.

pub mod commands;
pub mod output;
pub mod selector;
pub mod verify;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::output::Format;
use crate::selector::FunctionArg;

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "QDECAY_THREADS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] qdecay_core::Error),
    #[error("cannot write output: {0}")]
    Output(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("verification failed: {failed} of {total} checks did not pass")]
    VerifyFailed { failed: usize, total: usize },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_numerical_guard() => 2,
            CliError::VerifyFailed { .. } => 3,
            _ => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "qdecay",
    version,
    about = "Coefficient extraction and decay analysis for q-series"
)]
pub struct Cli {
    /// Output encoding.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write to a file instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Taylor or q-expansion coefficients by circle or strip quadrature.
    Extract(ExtractArgs),
    /// Exact Ramanujan tau values.
    Tau(TauArgs),
    /// Exponential vs polynomial decay fit of exact coefficients.
    Decay(DecayArgs),
    /// Bounds implied by extraction on the circles |z| = 1 - δ.
    DeltaSweep(DeltaSweepArgs),
    /// |τ(n)| against the n^{11/2+γ} and d(n)·n^{11/2} envelopes.
    RpCompare(RpCompareArgs),
    /// Cross-radius, height, Φ-equivalence, periodicity and oracle suites.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Samples {
    Auto,
    Count(usize),
}

impl FromStr for Samples {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "auto" {
            return Ok(Samples::Auto);
        }
        s.parse()
            .map(Samples::Count)
            .map_err(|_| format!("expected a sample count or 'auto', got '{s}'"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Precision {
    Binary64,
    Extended,
}

#[derive(Debug, Clone, Copy, Args)]
#[group(required = true, multiple = false)]
pub struct Location {
    /// Circle radius r for disc extraction.
    #[arg(long)]
    pub radius: Option<f64>,
    /// Line height y for half-plane extraction.
    #[arg(long)]
    pub height: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    /// Function selector, e.g. `geometric:2`, `polynomial:1,-2,3i` or `delta`.
    #[arg(long)]
    pub function: FunctionArg,
    #[command(flatten)]
    pub location: Location,
    /// Largest coefficient index.
    #[arg(long)]
    pub max_n: usize,
    /// Sample count, or `auto` for the next power of two ≥ 4·max_n.
    #[arg(long, default_value = "auto")]
    pub samples: Samples,
    /// Arithmetic for the transform.
    #[arg(long, value_enum, default_value_t = Precision::Binary64)]
    pub precision: Precision,
}

#[derive(Debug, Args)]
pub struct TauArgs {
    /// Last index n.
    #[arg(long)]
    pub max_n: usize,
}

#[derive(Debug, Args)]
pub struct DecayArgs {
    /// Function selector, e.g. `geometric:2`, `polynomial:1,-2,3i` or `delta`.
    #[arg(long)]
    pub function: FunctionArg,
    /// Last index of the fit range.
    #[arg(long, default_value_t = 200)]
    pub max_n: usize,
    /// First index of the fit range.
    #[arg(long, default_value_t = 1)]
    pub min_n: usize,
    /// Exponents m for the constants C_m.
    #[arg(long = "m", value_delimiter = ',')]
    pub m_list: Vec<u32>,
    /// Onset D for the constants; defaults to min-n.
    #[arg(long)]
    pub onset: Option<usize>,
    /// Fit the running maximum of |a_n| instead of the raw values.
    #[arg(long)]
    pub envelope: bool,
}

#[derive(Debug, Args)]
pub struct DeltaSweepArgs {
    /// Function selector, e.g. `geometric:2`, `polynomial:1,-2,3i` or `delta`.
    #[arg(long)]
    pub function: FunctionArg,
    /// Largest index n.
    #[arg(long)]
    pub max_n: usize,
    /// Polynomial weight n^m in A_m(δ).
    #[arg(long = "m", default_value_t = 2)]
    pub m: u32,
    /// Comma-separated offsets δ in (0, 1).
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9"
    )]
    pub deltas: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct RpCompareArgs {
    /// Last index n.
    #[arg(long, alias = "tau-range", default_value_t = 2000)]
    pub max_n: usize,
    /// Extra exponent γ in the envelope n^{11/2+γ}.
    #[arg(long, default_value_t = 0.0)]
    pub gamma: f64,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, hide = true)]
    pub inject_fault: bool,
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| {
            CliError::Usage(format!(
                "{THREADS_ENV} must be a positive integer, got '{value}'"
            ))
        })?;
    // A second call in the same process keeps the first pool.
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global();
    Ok(())
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    configure_threads()?;
    match &cli.output {
        Some(path) => {
            let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
            commands::dispatch(cli, &mut file)?;
            file.flush()?;
            Ok(())
        }
        None => commands::dispatch(cli, out),
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let code = e.exit_code();
            let prefix = match code {
                2 => "numerical hypothesis violated: ",
                _ => "",
            };
            let _ = writeln!(err, "error: {prefix}{e}");
            code
        }
    }
}
