use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use normprod_core::{Axis, Method, Overrides};

#[derive(Debug, Parser)]
#[command(name = "normprod", version, about = "Sparse recovery experiments under the normal product prior")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Recover a signal from a matrix file and an observation file.
    Recover(RecoverArgs),
    /// Write a seeded problem instance as CSV files.
    Generate(GenerateArgs),
    /// Success rate over a sweep of M (or K) with paired trials.
    Phase(PhaseArgs),
    /// Per-iteration error of each method on one seeded instance.
    Trace(TraceArgs),
    /// Run the built-in consistency checks.
    Selftest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AxisArg {
    M,
    K,
}

impl From<AxisArg> for Axis {
    fn from(a: AxisArg) -> Self {
        match a {
            AxisArg::M => Axis::M,
            AxisArg::K => Axis::K,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    /// Relative-change stop threshold.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Iteration cap.
    #[arg(long = "t-max")]
    pub t_max: Option<usize>,
    /// Gamma shape of the NP-1 precision hyperprior.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Gamma rate of the NP-1 precision hyperprior.
    #[arg(long)]
    pub beta: Option<f64>,
}

impl SolverArgs {
    pub fn overrides(&self) -> Overrides {
        Overrides { epsilon: self.epsilon, t_max: self.t_max, alpha: self.alpha, beta: self.beta }
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Include wall-clock columns (makes output run-dependent).
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Args)]
pub struct RecoverArgs {
    /// Sensing matrix: one comma-separated row per line, no header.
    #[arg(long)]
    pub matrix: PathBuf,
    /// Observation vector: one value per line.
    #[arg(long)]
    pub observation: PathBuf,
    /// Ground truth, one value per line; adds relative errors to the trace.
    #[arg(long)]
    pub truth: Option<PathBuf>,
    #[arg(long, default_value = "np1")]
    pub method: Method,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub seed: u64,
    /// Directory receiving matrix.csv, observation.csv and truth.csv.
    #[arg(long = "out-dir")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct PhaseArgs {
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    /// Swept dimension; the other one is held at --m or --k.
    #[arg(long, value_enum, default_value = "m")]
    pub sweep: AxisArg,
    /// Fixed M when sweeping K.
    #[arg(long, default_value_t = 30)]
    pub m: usize,
    /// Fixed K when sweeping M.
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    /// Sweep values; defaults to 10,15,...,50 for M and 1,...,15 for K.
    #[arg(long, value_delimiter = ',')]
    pub values: Vec<usize>,
    /// Methods, comma-separated or repeated.
    #[arg(long, value_delimiter = ',', default_value = "np0,np1,sbl,irls,bp")]
    pub method: Vec<Method>,
    #[arg(long, default_value_t = 300)]
    pub trials: usize,
    #[arg(long)]
    pub seed: u64,
    /// Worker threads; defaults to the available cores.
    #[arg(long)]
    pub workers: Option<usize>,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct TraceArgs {
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    #[arg(long, default_value_t = 30)]
    pub m: usize,
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    #[arg(long, value_delimiter = ',', default_value = "np0,np1,sbl,irls,bp")]
    pub method: Vec<Method>,
    #[arg(long)]
    pub seed: u64,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}
