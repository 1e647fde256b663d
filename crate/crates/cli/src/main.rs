use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sdr_svm::Error;

mod commands;
mod manifest;

/// Sparse reject-option SVM trained with the double ramp loss.
#[derive(Debug, Parser)]
#[command(name = "sdr-svm", version)]
struct Cli {
    /// More log output (-v info, -vv debug, -vvv trace).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    /// Seed for every random choice (fold splits, label noise, Monte Carlo draws).
    #[arg(long, default_value_t = 1, global = true)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Train one model and write it with a training report.
    Train(TrainArgs),
    /// Score a CSV with a saved model.
    Predict(PredictArgs),
    /// Report reject-option metrics of a saved model on labelled data.
    Evaluate(EvaluateArgs),
    /// Grid search with repeated stratified k-fold cross-validation.
    Cv(CvArgs),
    /// Cross-validation repeated at several label-noise rates.
    NoiseSweep(NoiseSweepArgs),
    /// Numerical checks of the loss's consistency and excess-risk bounds.
    TheoryCheck(TheoryArgs),
}

#[derive(Debug, Args)]
struct CsvArgs {
    /// Input CSV.
    #[arg(long)]
    data: PathBuf,

    /// First row holds column names.
    #[arg(long)]
    header: bool,

    /// Label column: `last`, `none`, a zero-based index or a header name.
    #[arg(long, default_value = "last")]
    label: String,

    /// Label token mapped to +1; every other token maps to -1.
    #[arg(long, default_value = "1")]
    positive: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KernelArg {
    Gaussian,
    Linear,
}

#[derive(Debug, Args)]
struct TrainArgs {
    #[command(flatten)]
    csv: CsvArgs,

    /// Rejection cost.
    #[arg(long, default_value_t = 0.2)]
    d: f64,

    /// Ramp width.
    #[arg(long, default_value_t = 1.0)]
    mu: f64,

    #[arg(long, default_value_t = 0.01)]
    lambda: f64,

    #[arg(long, value_enum, default_value_t = KernelArg::Gaussian)]
    kernel: KernelArg,

    /// Gaussian kernel width, `exp(-gamma |x - z|^2)`. Defaults to 1.
    #[arg(long)]
    gamma: Option<f64>,

    /// Stop when one iteration lowers the objective by at most this much.
    #[arg(long, default_value_t = 1e-5)]
    epsilon: f64,

    /// Cap on DC iterations.
    #[arg(long, default_value_t = 50)]
    max_iters: usize,

    /// Cap on simplex pivots per subproblem.
    #[arg(long)]
    lp_iter_cap: Option<usize>,

    /// Start from the all-zero model only.
    #[arg(long)]
    no_warm_start: bool,

    /// Model file to write.
    #[arg(long)]
    out: PathBuf,

    /// Training report (JSON). Defaults to `<out>.report.json`.
    #[arg(long)]
    report: Option<PathBuf>,

    /// Write every LP subproblem to `<PREFIX><iteration>.lp`.
    #[arg(long, value_name = "PREFIX")]
    dump_lp: Option<String>,
}

#[derive(Debug, Args)]
struct PredictArgs {
    #[arg(long)]
    model: PathBuf,

    #[command(flatten)]
    csv: CsvArgs,

    /// Predictions CSV; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    #[arg(long)]
    model: PathBuf,

    #[command(flatten)]
    csv: CsvArgs,

    /// Also write the metrics as JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GridArgs {
    #[command(flatten)]
    csv: CsvArgs,

    /// Rejection costs: `start:stop:step` (stop excluded) or a comma list.
    #[arg(long, default_value = "0.05:0.5:0.05")]
    d_grid: String,

    #[arg(long, default_value_t = 10)]
    folds: usize,

    #[arg(long, default_value_t = 10)]
    repeats: usize,

    /// Regularization grid; defaults to 10^-3 .. 10 in half decades.
    #[arg(long)]
    lambda_grid: Option<String>,

    /// Gaussian width grid; defaults to 2^-4 .. 2^2.
    #[arg(long)]
    gamma_grid: Option<String>,

    #[arg(long, value_enum, default_value_t = KernelArg::Gaussian)]
    kernel: KernelArg,

    #[arg(long, default_value_t = 1.0)]
    mu: f64,

    #[arg(long, default_value_t = 1e-5)]
    epsilon: f64,

    #[arg(long, default_value_t = 50)]
    max_iters: usize,
}

#[derive(Debug, Args)]
struct CvArgs {
    #[command(flatten)]
    grid: GridArgs,

    /// Fraction of training labels flipped in every fold.
    #[arg(long, default_value_t = 0.0)]
    noise: f64,

    /// Per-fold metrics CSV.
    #[arg(long)]
    out: PathBuf,

    /// Per-d summary CSV of the selected grid points.
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct NoiseSweepArgs {
    #[command(flatten)]
    grid: GridArgs,

    /// Comma-separated noise rates.
    #[arg(long, default_value = "0,0.1,0.2,0.3")]
    rates: String,

    /// Directory for `metrics_noise_<rate>.csv` and `summary_noise_<rate>.csv`.
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Debug, Args)]
struct TheoryArgs {
    /// Coarse grid and fewer Monte Carlo draws.
    #[arg(long)]
    quick: bool,

    /// Full report as JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Why a subcommand stopped.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Core(Error),
    TheoryViolation,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Core(Error::Io(e))
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) | Failure::Core(Error::InvalidConfig(_)) => 1,
            Failure::Core(Error::NonTermination { .. } | Error::LpUnbounded { .. } | Error::LpInfeasible { .. }) => 3,
            Failure::Core(_) => 2,
            Failure::TheoryViolation => 4,
        }
    }
}

fn main() -> ExitCode {
    let args = match manifest::expand_config(std::env::args_os().collect()) {
        Ok(a) => a,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(1);
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        2 => "debug",
        _ => "trace",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let seed = cli.seed;
    let result = match cli.command {
        Command::Train(a) => commands::train(a),
        Command::Predict(a) => commands::predict(a),
        Command::Evaluate(a) => commands::evaluate(a),
        Command::Cv(a) => commands::cv(a, seed),
        Command::NoiseSweep(a) => commands::noise_sweep(a, seed),
        Command::TheoryCheck(a) => commands::theory_check(a, seed),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Usage(m) => eprintln!("error: {m}"),
                Failure::Core(e) => eprintln!("error: {e}"),
                Failure::TheoryViolation => eprintln!("error: theory check found violations"),
            }
            ExitCode::from(f.exit_code())
        }
    }
}
