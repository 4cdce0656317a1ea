//! `socbench`: generate synthetic drive cycles, train and evaluate SOC
//! estimators, and compare optimizers.
//!
//! Exit codes: 0 success, 1 I/O or data error, 2 usage or configuration
//! error, 3 numeric divergence, 4 model/data mismatch.

mod commands;
mod settings;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use socbench::optim::Algorithm;
use socbench::Error;

#[derive(Debug, Parser)]
#[command(
    name = "socbench",
    version,
    about = "Battery state-of-charge estimation benchmark"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate a drive cycle and write it as telemetry CSV.
    Generate(GenerateArgs),
    /// Train a network on one cycle and save it as JSON.
    Train(TrainArgs),
    /// Score a saved model on a cycle.
    Evaluate(EvaluateArgs),
    /// Compare optimizers across one or more cycles.
    Compare(CompareArgs),
}

/// Cell and excitation settings for `generate`. Every flag except `--out`
/// and `--config` can also be set in the config file under the same name
/// with `_` for `-`.
#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// `key = value` file; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// constant, pulse or random [default: random]
    #[arg(long)]
    pub profile: Option<String>,
    /// Profile current in amperes, positive for discharge.
    #[arg(long, allow_hyphen_values = true)]
    pub current: Option<f64>,
    /// Pulse length in seconds.
    #[arg(long)]
    pub pulse_on: Option<f64>,
    /// Rest between pulses in seconds.
    #[arg(long)]
    pub pulse_off: Option<f64>,
    /// Simulated time in seconds.
    #[arg(long)]
    pub duration: Option<f64>,
    #[arg(long)]
    pub capacity_ah: Option<f64>,
    #[arg(long)]
    pub r_internal_ohm: Option<f64>,
    #[arg(long)]
    pub v_min: Option<f64>,
    #[arg(long)]
    pub v_max: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub t_ambient_c: Option<f64>,
    #[arg(long)]
    pub heating_coeff: Option<f64>,
    #[arg(long)]
    pub cooling_rate: Option<f64>,
    #[arg(long)]
    pub sample_period_s: Option<f64>,
    #[arg(long)]
    pub soc0_percent: Option<f64>,
    #[arg(long)]
    pub out: PathBuf,
}

/// How raw telemetry becomes SOC-labelled rows.
#[derive(Debug, Args)]
pub struct CycleArgs {
    /// Flip current signs for logs that record discharge as negative.
    #[arg(long)]
    pub invert_current: bool,
    /// Initial SOC in percent [default: 100]
    #[arg(long)]
    pub soc0_percent: Option<f64>,
    /// Cell capacity; overrides a `capacity_ah` column in the data.
    #[arg(long)]
    pub capacity_ah: Option<f64>,
}

#[derive(Debug, Args)]
pub struct TrainingArgs {
    /// Comma-separated hidden-layer widths [default: 256,256,256]
    #[arg(long)]
    pub hidden: Option<String>,
    /// Moving-average window in samples [default: 400]
    #[arg(long)]
    pub window: Option<usize>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[arg(long)]
    pub beta1: Option<f64>,
    #[arg(long)]
    pub beta2: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub rho: Option<f64>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Telemetry CSV.
    #[arg(long)]
    pub data: PathBuf,
    /// sgd, rmsprop, adam or adamax [default: adamax]
    #[arg(long)]
    pub optimizer: Option<Algorithm>,
    /// Learning rate [default: 0.01 for sgd, 0.001 otherwise]
    #[arg(long)]
    pub lr: Option<f64>,
    #[command(flatten)]
    pub training: TrainingArgs,
    #[command(flatten)]
    pub cycle: CycleArgs,
    #[arg(long, default_value = "model.json")]
    pub model_out: PathBuf,
    #[arg(long, default_value = "training_log.csv")]
    pub log_out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub data: PathBuf,
    #[command(flatten)]
    pub cycle: CycleArgs,
    /// Write `soc_true,soc_pred` per row.
    #[arg(long)]
    pub predictions_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Telemetry CSV; repeat for several cycles.
    #[arg(long)]
    pub data: Vec<PathBuf>,
    /// Directory whose `*.csv` files are all used as cycles.
    #[arg(long)]
    pub data_dir: Option<PathBuf>,
    /// Comma-separated optimizers [default: sgd,rmsprop,adamax]
    #[arg(long)]
    pub optimizers: Option<String>,
    /// One rate for all optimizers, or `name:rate` pairs such as
    /// `sgd:0.001,adamax:0.002`.
    #[arg(long)]
    pub lr: Option<String>,
    #[command(flatten)]
    pub training: TrainingArgs,
    #[command(flatten)]
    pub cycle: CycleArgs,
    /// Cross-validation folds [default: 4]
    #[arg(long)]
    pub folds: Option<usize>,
    /// shuffled or contiguous [default: shuffled]
    #[arg(long)]
    pub fold_mode: Option<String>,
    /// interleaved or chronological [default: interleaved]
    #[arg(long)]
    pub split: Option<String>,
    /// Share of each cycle used for training [default: 0.8]
    #[arg(long)]
    pub train_fraction: Option<f64>,
    /// Worker threads; 0 uses every core [default: 0]
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long, default_value = "results.csv")]
    pub out: PathBuf,
    /// Also write the text table here.
    #[arg(long)]
    pub table_out: Option<PathBuf>,
    /// Directory for per-run training logs.
    #[arg(long)]
    pub log_dir: Option<PathBuf>,
    /// Fill the `seconds` column with wall time instead of 0.
    #[arg(long)]
    pub record_time: bool,
}

fn exit_code(err: &Error) -> u8 {
    match err.root() {
        Error::Config(_) => 2,
        Error::Diverged { .. } | Error::Numeric(_) => 3,
        Error::ModelMismatch(_) => 4,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Generate(a) => commands::generate(a),
        Command::Train(a) => commands::train(a),
        Command::Evaluate(a) => commands::evaluate(a),
        Command::Compare(a) => commands::compare(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
