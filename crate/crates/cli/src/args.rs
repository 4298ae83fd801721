//! Command-line surface. Every flag is optional here; defaults and the
//! optional JSON run-config file are folded in by [`crate::config`],
//! with explicit flags taking precedence over the file.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sensorfuse::{ModelFamily, SensorKind};

#[derive(Debug, Parser)]
#[command(
    name = "sensorfuse",
    version,
    about = "Multi-sensor activity recognition: synthesis, exploration, \
             training, evaluation, filtering, and model comparison"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a labeled synthetic dataset in the canonical CSV layout
    Synth(SynthArgs),
    /// Summarize a dataset: time series, histograms, channel correlation
    Explore(ExploreArgs),
    /// Train one classifier and save it as a JSON model file
    Train(TrainArgs),
    /// Score a saved model on a dataset split
    Eval(EvalArgs),
    /// Write a copy of a dataset with Kalman-filtered estimate columns
    Kalman(KalmanArgs),
    /// Train every model family on every sensor view and write a report
    Compare(CompareArgs),
}

/// Flags shared by every subcommand.
#[derive(Debug, Args)]
pub struct CommonArgs {
    /// JSON run-config file; explicit flags override its values
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Directory that receives all output files
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,

    /// Seed for splits, generators, and model training
    #[arg(long)]
    pub seed: Option<u64>,
}

/// Flags for subcommands that read a dataset.
#[derive(Debug, Args)]
pub struct InputArgs {
    /// Input CSV: one synchronized file, or three per-sensor stream files
    #[arg(long, value_name = "PATH")]
    pub input: Vec<PathBuf>,

    /// Layout of the input data
    #[arg(long, value_enum)]
    pub dataset_kind: Option<DatasetKindArg>,

    /// Timestamp join tolerance in milliseconds for three-stream inputs
    #[arg(long, value_name = "MS")]
    pub tolerance_ms: Option<i64>,
}

/// Hyperparameter flags shared by the training subcommands.
#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Fraction of rows assigned to the training split
    #[arg(long)]
    pub ratio: Option<f64>,

    /// Number of trees in a random forest
    #[arg(long)]
    pub trees: Option<usize>,

    /// Number of boosting stages
    #[arg(long)]
    pub stages: Option<usize>,

    /// Boosting learning rate
    #[arg(long)]
    pub eta: Option<f64>,

    /// Process-noise scale of the Kalman filter
    #[arg(long)]
    pub q_scale: Option<f64>,

    /// Measurement-noise scale of the Kalman filter
    #[arg(long)]
    pub r_scale: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    /// Number of activity classes
    #[arg(long)]
    pub classes: Option<usize>,

    /// Rows generated per class
    #[arg(long)]
    pub per_class: Option<usize>,

    /// Minimum distance between class centers, same on every sensor
    #[arg(long)]
    pub separation: Option<f64>,

    /// Per-sensor center separations: accelerometer,gyroscope,magnetometer
    #[arg(long, value_name = "A,G,M", value_delimiter = ',', num_args = 1)]
    pub separations: Option<Vec<f64>>,

    /// Standard deviation of every class cluster
    #[arg(long)]
    pub stddev: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ExploreArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    #[command(flatten)]
    pub input: InputArgs,

    /// Number of histogram bins per channel
    #[arg(long)]
    pub bins: Option<usize>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    #[command(flatten)]
    pub input: InputArgs,

    #[command(flatten)]
    pub model: ModelArgs,

    /// Model family to train
    #[arg(long = "model", value_enum, value_name = "FAMILY")]
    pub family: Option<FamilyArg>,

    /// How the sensor channels are combined
    #[arg(long, value_enum)]
    pub fusion: Option<FusionArg>,

    /// Sensors to use, e.g. "mag" or "accel,gyro,mag"
    #[arg(long, value_delimiter = ',', value_parser = parse_sensor, value_name = "LIST")]
    pub sensors: Option<Vec<SensorKind>>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    #[command(flatten)]
    pub input: InputArgs,

    /// Saved model JSON file to score
    #[arg(long, value_name = "PATH")]
    pub model_file: PathBuf,

    /// Fraction of rows assigned to the training split
    #[arg(long)]
    pub ratio: Option<f64>,

    /// Which side of the split to score
    #[arg(long, value_enum, default_value_t = SplitArg::Test)]
    pub split: SplitArg,
}

#[derive(Debug, Args)]
pub struct KalmanArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    #[command(flatten)]
    pub input: InputArgs,

    /// Process-noise scale
    #[arg(long)]
    pub q_scale: Option<f64>,

    /// Measurement-noise scale
    #[arg(long)]
    pub r_scale: Option<f64>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    #[command(flatten)]
    pub input: InputArgs,

    #[command(flatten)]
    pub model: ModelArgs,

    /// Model family used for the per-sensor voting ensemble
    #[arg(long, value_enum, value_name = "FAMILY")]
    pub decision_base: Option<FamilyArg>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DatasetKindArg {
    /// Canonical layout: Timestamp, nine channels, label
    Primary,
    /// Foreign layout mapped through a column adapter
    Secondary,
    /// Generated from cluster parameters; reads no files
    Synthetic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    /// One-vs-rest linear support vector machine
    Svm,
    /// Gradient-boosted decision trees
    Gboost,
    /// Random forest
    Rf,
}

impl From<FamilyArg> for ModelFamily {
    fn from(arg: FamilyArg) -> ModelFamily {
        match arg {
            FamilyArg::Svm => ModelFamily::LinearSvm,
            FamilyArg::Gboost => ModelFamily::GradientBoost,
            FamilyArg::Rf => ModelFamily::RandomForest,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FusionArg {
    /// A single sensor's raw channels
    None,
    /// Concatenated channels of the selected sensors
    Feature,
    /// Per-sensor models combined by majority vote
    Decision,
    /// Kalman-filtered estimate columns
    Kalman,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SplitArg {
    Train,
    Test,
    All,
}

fn parse_sensor(name: &str) -> Result<SensorKind, String> {
    SensorKind::parse(name)
        .ok_or_else(|| format!("unknown sensor {name:?} (expected accel, gyro, or mag)"))
}
