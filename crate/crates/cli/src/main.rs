//! Command-line front end: synthetic data generation, decomposition,
//! parameter optimization, training, diagnosis, evaluation and optimizer
//! benchmarks.
//!
//! Every command prints a JSON run report to stdout embedding the seed and
//! the full effective configuration; wall-clock timing goes to stderr so
//! seeded reruns stay byte-identical. Exit codes: 0 success, 2 usage or
//! configuration problems, 3 data problems, 4 model problems.

use std::fmt;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fmdiag_core::error::CoreError;

mod commands;
mod io;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, unusable configuration, missing files. Exit 2.
    Usage(String),
    /// Unusable signal data. Exit 3.
    Data(String),
    /// Model parse or version problems. Exit 4.
    Model(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) => 3,
            CliError::Model(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::Model(m) => f.write_str(m),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InvalidArgument(_) | CoreError::InvalidConfig(_) => {
                CliError::Usage(e.to_string())
            }
            CoreError::ParseError(_) | CoreError::VersionError { .. } => {
                CliError::Model(e.to_string())
            }
            _ => CliError::Data(e.to_string()),
        }
    }
}

/// Seed resolution: explicit flag, then the FMDIAG_SEED environment
/// variable, then 0.
pub fn resolve_seed(flag: Option<u64>) -> u64 {
    flag.or_else(|| {
        std::env::var("FMDIAG_SEED")
            .ok()
            .and_then(|s| s.parse().ok())
    })
    .unwrap_or(0)
}

#[derive(Parser)]
#[command(
    name = "fmdiag",
    version,
    about = "Bearing vibration diagnosis via adaptive feature mode decomposition"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic bearing record or fractional Gaussian noise as CSV.
    Simulate(SimulateArgs),
    /// Decompose a signal into modes, optionally optimizing (K, L) first.
    Decompose(DecomposeArgs),
    /// Train a diagnosis model from a labeled manifest.
    Train(TrainArgs),
    /// Label a signal with a trained model.
    Diagnose(DiagnoseArgs),
    /// Run a model over a labeled manifest and report a confusion matrix.
    Eval(EvalArgs),
    /// Benchmark the optimizer on standard test functions.
    BenchAha(BenchArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SimKind {
    Bearing,
    Fgn,
}

#[derive(Args)]
pub struct SimulateArgs {
    /// Output CSV path.
    #[arg(long)]
    pub out: std::path::PathBuf,
    /// What to generate.
    #[arg(long, value_enum, default_value = "bearing")]
    pub kind: SimKind,
    /// Sample rate in Hz.
    #[arg(long, default_value_t = 19_200.0)]
    pub fs: f64,
    /// Record length in seconds.
    #[arg(long, default_value_t = 2.5)]
    pub duration: f64,
    /// Impulse repetition rate in Hz.
    #[arg(long, default_value_t = 12.34)]
    pub fault_freq: f64,
    /// Structural resonance in Hz.
    #[arg(long, default_value_t = 3000.0)]
    pub resonance_freq: f64,
    /// Ring decay rate in 1/s.
    #[arg(long, default_value_t = 800.0)]
    pub damping: f64,
    /// Impulse ring amplitude.
    #[arg(long, default_value_t = 3.0)]
    pub impulse_amp: f64,
    /// Shaft tone frequency in Hz.
    #[arg(long, default_value_t = 25.0)]
    pub shaft_freq: f64,
    /// Shaft tone amplitude.
    #[arg(long, default_value_t = 1.0)]
    pub shaft_amp: f64,
    /// Additive white noise standard deviation.
    #[arg(long, default_value_t = 0.5, conflicts_with = "snr")]
    pub noise_std: f64,
    /// Noise level as signal-to-noise ratio in dB against the clean record.
    #[arg(long)]
    pub snr: Option<f64>,
    /// Slip jitter fraction in [0, 0.05].
    #[arg(long, default_value_t = 0.01)]
    pub slip: f64,
    /// RNG seed (falls back to FMDIAG_SEED, then 0).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Hurst exponent for --kind fgn.
    #[arg(long, default_value_t = 0.7)]
    pub fgn_hurst: f64,
    /// Scale for --kind fgn.
    #[arg(long, default_value_t = 1.0)]
    pub fgn_sigma: f64,
}

#[derive(Args)]
pub struct DecomposeArgs {
    /// Input signal CSV.
    #[arg(long)]
    pub input: std::path::PathBuf,
    /// Mode count K.
    #[arg(long = "K", required_unless_present = "optimize")]
    pub k: Option<usize>,
    /// Filter length L.
    #[arg(long = "L", required_unless_present = "optimize")]
    pub l: Option<usize>,
    /// Search (K, L) with the optimizer before decomposing.
    #[arg(long)]
    pub optimize: bool,
    /// Skip the standard parameter-domain pre-check (K in [3,8], L in
    /// [20,50]); structurally impossible settings are still rejected.
    #[arg(long = "unsafe")]
    pub unsafe_params: bool,
    /// Directory for the per-mode CSV files.
    #[arg(long, default_value = "modes")]
    pub out_dir: std::path::PathBuf,
    /// Optimizer population (with --optimize).
    #[arg(long, default_value_t = 30)]
    pub pop: usize,
    /// Optimizer iterations (with --optimize).
    #[arg(long, default_value_t = 20)]
    pub iters: usize,
    /// Optimizer seed (with --optimize; falls back to FMDIAG_SEED, then 0).
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args)]
pub struct TrainArgs {
    /// Manifest JSON mapping labels to signal-file lists.
    #[arg(long)]
    pub manifest: std::path::PathBuf,
    /// Output model path.
    #[arg(long)]
    pub out: std::path::PathBuf,
    /// Master seed (falls back to FMDIAG_SEED, then 0).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Optimizer population per condition.
    #[arg(long, default_value_t = 30)]
    pub pop: usize,
    /// Optimizer iterations per condition.
    #[arg(long, default_value_t = 20)]
    pub iters: usize,
    /// Number of lowest-SIMI modes forming the feature vector.
    #[arg(long, default_value_t = 4)]
    pub selected_modes: usize,
    /// Lower mode-count search bound.
    #[arg(long, default_value_t = 3)]
    pub k_min: usize,
    /// Upper mode-count search bound.
    #[arg(long, default_value_t = 8)]
    pub k_max: usize,
    /// Lower filter-length search bound.
    #[arg(long, default_value_t = 20)]
    pub l_min: usize,
    /// Upper filter-length search bound.
    #[arg(long, default_value_t = 50)]
    pub l_max: usize,
    /// Initial filter-bank size.
    #[arg(long, default_value_t = 7)]
    pub init_filters: usize,
    /// Deconvolution sweeps per reduction cycle.
    #[arg(long, default_value_t = 20)]
    pub fmd_iters: usize,
    /// Comma-separated per-feature weights (default: uniform
    /// 1/selected_modes).
    #[arg(long, value_delimiter = ',')]
    pub weights: Option<Vec<f64>>,
}

#[derive(Args)]
pub struct DiagnoseArgs {
    /// Trained model JSON.
    #[arg(long)]
    pub model: std::path::PathBuf,
    /// Input signal CSV.
    #[arg(long)]
    pub input: std::path::PathBuf,
}

#[derive(Args)]
pub struct EvalArgs {
    /// Trained model JSON.
    #[arg(long)]
    pub model: std::path::PathBuf,
    /// Manifest JSON mapping true labels to signal-file lists.
    #[arg(long)]
    pub manifest: std::path::PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BenchFunction {
    Sphere,
    Rastrigin,
}

#[derive(Args)]
pub struct BenchArgs {
    /// Test function.
    #[arg(long, value_enum)]
    pub function: BenchFunction,
    /// Dimension count.
    #[arg(long, default_value_t = 5)]
    pub dims: usize,
    /// Iterations per run.
    #[arg(long, default_value_t = 500)]
    pub iters: usize,
    /// Number of seeds, starting at --seed-start.
    #[arg(long, default_value_t = 10)]
    pub seeds: u64,
    /// First seed of the run list.
    #[arg(long, default_value_t = 0)]
    pub seed_start: u64,
    /// Population size.
    #[arg(long, default_value_t = 30)]
    pub pop: usize,
    /// Output CSV with per-seed, per-iteration best fitness.
    #[arg(long)]
    pub out: std::path::PathBuf,
}

/// One JSON document per run: what ran, with which seed and configuration,
/// and what came out.
#[derive(serde::Serialize)]
pub struct RunReport {
    pub command: String,
    pub seed: Option<u64>,
    pub config: serde_json::Value,
    pub outputs: serde_json::Value,
}

pub fn print_report(report: &RunReport) {
    println!(
        "{}",
        serde_json::to_string_pretty(report).expect("report serialization cannot fail")
    );
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate(args) => commands::simulate(args),
        Command::Decompose(args) => commands::decompose(args),
        Command::Train(args) => commands::train(args),
        Command::Diagnose(args) => commands::diagnose(args),
        Command::Eval(args) => commands::eval(args),
        Command::BenchAha(args) => commands::bench_aha(args),
    }
}

fn main() {
    let cli = Cli::parse();
    let start = Instant::now();
    match run(cli) {
        Ok(()) => {
            eprintln!("completed in {:.2}s", start.elapsed().as_secs_f64());
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.code());
        }
    }
}
