//! Command-line arguments.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

pub const DATA_DIR_ENV: &str = "COVSHIFT_DATA_DIR";

#[derive(Debug, Parser)]
#[command(
    name = "covshift",
    version,
    about = "Semi-supervised logistic discrimination under covariate shift",
    long_about = "Semi-supervised logistic discrimination under covariate shift.\n\n\
        Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Select (gamma1, gamma2, log10 lambda) by GIC for one or more methods
    Select(SelectArgs),
    /// Fit one model and save it as a JSON model file
    Fit(FitArgs),
    /// Predict class probabilities and labels with a saved model
    Predict(PredictArgs),
    /// Re-run the simulation or benchmark comparison studies
    Replicate(ReplicateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodArg {
    Sslrcs,
    Lsslr,
    Slr,
    All,
}

/// Input files shared by `select` and `fit`.
#[derive(Debug, Clone, Args, Serialize)]
pub struct DataArgs {
    /// Labeled CSV: header row, feature columns, final `label` column in {0,1}
    #[arg(long, value_name = "CSV")]
    pub labeled: PathBuf,
    /// Unlabeled CSV with the same feature columns (not needed for slr)
    #[arg(long, value_name = "CSV")]
    pub unlabeled: Option<PathBuf>,
    /// Standardize features with the mean and sd of the labeled and unlabeled rows
    #[arg(long)]
    pub standardize: bool,
    /// Seed for density-ratio estimation
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// Candidate grid. Each axis takes a comma list (`0,0.5,1`) or an inclusive
/// range (`start:step:end`).
#[derive(Debug, Clone, Args, Serialize)]
pub struct GridArgs {
    /// gamma1 candidates (labeled-weight exponent)
    #[arg(long, default_value = "0:0.1:1", allow_hyphen_values = true)]
    pub grid_gamma1: String,
    /// gamma2 candidates (unlabeled-weight exponent)
    #[arg(long, default_value = "0:0.1:1", allow_hyphen_values = true)]
    pub grid_gamma2: String,
    /// log10 lambda candidates (ridge strength)
    #[arg(long, default_value = "-4:0.5:2.5", allow_hyphen_values = true)]
    pub grid_log10_lambda: String,
}

/// Where results go.
#[derive(Debug, Clone, Args, Serialize)]
pub struct OutputArgs {
    /// Write the JSON result to this file
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,
    /// Print JSON to stdout instead of the text table
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SelectArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Labeled test CSV; when given, the prediction error of each selected model is reported
    #[arg(long, value_name = "CSV")]
    pub test: Option<PathBuf>,
    /// Methods to run (repeat or comma-separate)
    #[arg(long, value_enum, value_delimiter = ',', default_value = "all")]
    pub method: Vec<MethodArg>,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FitArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Method to fit
    #[arg(long, value_enum, default_value = "sslrcs")]
    pub method: MethodArg,
    /// gamma1; with --gamma2 and --log10-lambda skips the grid search
    #[arg(long)]
    pub gamma1: Option<f64>,
    #[arg(long)]
    pub gamma2: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub log10_lambda: Option<f64>,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Path of the model file to write
    #[arg(long, value_name = "PATH")]
    pub model: PathBuf,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PredictArgs {
    /// Model file written by `fit`
    #[arg(long, value_name = "PATH")]
    pub model: PathBuf,
    /// CSV of feature columns with a header row
    #[arg(long, value_name = "CSV")]
    pub input: PathBuf,
    /// Write predictions here instead of stdout
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Study {
    Sim1,
    Sim2,
    Bench,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DatasetArg {
    G10,
    Ionosphere,
    Pima,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ReplicateArgs {
    /// Which study to run
    #[arg(value_enum)]
    pub study: Study,
    /// Monte Carlo trials (or random splits) per setting
    #[arg(long, default_value_t = 50)]
    pub trials: usize,
    /// Base seed; trial i uses seed + i
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// sim1: labeled sample sizes
    #[arg(long, default_value = "25,50,100,150,200,250")]
    pub n: String,
    /// sim2: cases to run
    #[arg(long, default_value = "1,2,3")]
    pub case: String,
    /// bench: datasets to run
    #[arg(long, value_enum, value_delimiter = ',', default_value = "g10,ionosphere,pima")]
    pub dataset: Vec<DatasetArg>,
    /// bench: labeled percentages of the training set
    #[arg(long, default_value = "5,10,20,30,40,50")]
    pub percent: String,
    /// bench: directory holding <name>_train.csv and <name>_test.csv
    #[arg(long, env = DATA_DIR_ENV, value_name = "DIR")]
    pub data_dir: Option<PathBuf>,
    /// bench: require the standard row and feature counts
    #[arg(long)]
    pub strict: bool,
    /// bench: standardize features with training-set statistics
    #[arg(long)]
    pub standardize: bool,
    /// bench: use the synthetic g10-shaped generator instead of files (not the original data)
    #[arg(long)]
    pub synthetic: bool,
    /// bench: draw labeled rows with a covariate-dependent bias of this strength
    #[arg(long)]
    pub selection_bias: Option<f64>,
    /// Methods to compare
    #[arg(long, value_enum, value_delimiter = ',', default_value = "all")]
    pub method: Vec<MethodArg>,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutputArgs,
}
