//! `heavytail` — sample the three normal-to-Cauchy transformations, evaluate
//! their exact densities, sweep the correlation parameter for Cauchy
//! verdicts, and run the verification suite.
//!
//! Exit codes: 0 success, 1 usage error, 2 numerical failure,
//! 3 verification failure.

mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "heavytail",
    version,
    about = "Correlated Gaussians into Cauchy laws: samplers, exact densities, verdicts"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw from one transformation and write `index,value` CSV
    Sample(SampleArgs),
    /// Evaluate the exact density g_V on a v-grid, CSV `v,g_v,err_est`
    Density(DensityArgs),
    /// Evaluate the tail functional v^2 g_V(v), CSV `v,v2_gv`
    Tail(TailArgs),
    /// Theta-derivative of g_V(0) at theta = 0, quadrature vs finite differences
    Derivative(DerivativeArgs),
    /// Cauchy/not-Cauchy verdicts across a theta grid, JSON
    Sweep(SweepArgs),
    /// Run the built-in verification suite
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TransformArg {
    Pm,
    Abs,
    Bm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DensityTransformArg {
    Abs,
    Bm,
}

#[derive(Args)]
#[command(group(ArgGroup::new("covariance").required(true).args(["theta", "cov"])))]
struct SampleArgs {
    /// Which transformation to sample
    #[arg(long, value_enum)]
    transform: TransformArg,
    /// Correlation parameter of the 2x2 equal-variance covariance
    #[arg(long, allow_negative_numbers = true)]
    theta: Option<f64>,
    /// Plain-text n x n covariance matrix, whitespace-separated rows
    #[arg(long)]
    cov: Option<PathBuf>,
    /// Convex weights, comma separated
    #[arg(long, value_delimiter = ',', required = true)]
    weights: Vec<f64>,
    /// Number of draws
    #[arg(long)]
    n: usize,
    /// RNG seed
    #[arg(long, env = "HEAVYTAIL_SEED", default_value_t = 0)]
    seed: u64,
    /// Output path; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DensityArgs {
    #[arg(long, value_enum)]
    transform: DensityTransformArg,
    #[arg(long, allow_negative_numbers = true)]
    theta: f64,
    #[arg(long, value_delimiter = ',', required = true)]
    weights: Vec<f64>,
    /// Evaluation grid `vmin:vmax:steps` with an integer point count
    #[arg(long, allow_hyphen_values = true)]
    grid: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TailArgs {
    #[arg(long, value_enum)]
    transform: DensityTransformArg,
    #[arg(long, allow_negative_numbers = true)]
    theta: f64,
    #[arg(long, value_delimiter = ',', required = true)]
    weights: Vec<f64>,
    /// Positive probe points, comma separated
    #[arg(long, value_delimiter = ',', required = true)]
    v_values: Vec<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DerivativeArgs {
    #[arg(long, value_enum)]
    transform: DensityTransformArg,
    #[arg(long, value_delimiter = ',', required = true)]
    weights: Vec<f64>,
    /// Central-difference step
    #[arg(long, default_value_t = 1e-4)]
    h: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// `pm` is rejected here: its law is Cauchy for every covariance
    #[arg(long, value_enum)]
    transform: TransformArg,
    /// Theta grid `start:end:step` with a real step size
    #[arg(long, allow_hyphen_values = true)]
    theta_grid: String,
    #[arg(long, value_delimiter = ',', required = true)]
    weights: Vec<f64>,
    /// Half-width of the decision band around 1/pi
    #[arg(long, default_value_t = heavytail::DEFAULT_DECISION_TOL)]
    decision_tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SuiteArg {
    Quick,
    Full,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = SuiteArg::Quick)]
    suite: SuiteArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Failures routed to their exit codes.
enum CliError {
    Usage(String),
    Numerical(String),
}

impl From<heavytail::Error> for CliError {
    fn from(e: heavytail::Error) -> Self {
        match e {
            heavytail::Error::QuadratureDidNotConverge { .. }
            | heavytail::Error::NotPositiveDefinite { .. } => CliError::Numerical(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Numerical(format!("i/o failure: {e}"))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let failed = e.use_stderr();
            let _ = e.print();
            return ExitCode::from(if failed { 1 } else { 0 });
        }
    };
    let outcome = match cli.command {
        Command::Sample(args) => commands::sample(args),
        Command::Density(args) => commands::density(args),
        Command::Tail(args) => commands::tail(args),
        Command::Derivative(args) => commands::derivative(args),
        Command::Sweep(args) => commands::sweep(args),
        Command::Verify(args) => commands::verify(args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Numerical(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
