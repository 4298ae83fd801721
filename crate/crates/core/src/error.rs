//! Error types shared across the crate.

use thiserror::Error;

/// Errors raised while constructing or partitioning datasets.
#[derive(Debug, Error)]
pub enum DataError {
    #[error("empty activity name for row {row}")]
    EmptyLabelName { row: usize },
    #[error("non-finite value in channel {channel} at row {row}")]
    NonFiniteChannel { row: usize, channel: usize },
    #[error("row {row} has label index {index} but the vocabulary holds {n_classes} classes")]
    LabelOutOfRange {
        row: usize,
        index: usize,
        n_classes: usize,
    },
    #[error("label vocabulary is not dense: entry {position} has index {index}")]
    VocabularyNotDense { position: usize, index: usize },
    #[error("duplicate activity name {name:?} in vocabulary")]
    DuplicateLabelName { name: String },
    #[error("split ratio must lie in (0, 1), got {ratio}")]
    InvalidSplitRatio { ratio: f64 },
    #[error("need at least {min} rows, found {n}")]
    TooFewRows { n: usize, min: usize },
}

/// Errors raised while parsing, synchronizing, or generating datasets.
#[derive(Debug, Error)]
pub enum IngestError {
    #[error("schema error: unknown column {name:?}")]
    UnknownColumn { name: String },
    #[error("schema error: duplicate column {name:?}")]
    DuplicateColumn { name: String },
    #[error("schema error: {message}")]
    Layout { message: String },
    #[error("parse error at row {row}, column {column:?}: {value:?} is not numeric")]
    NonNumericCell {
        row: u64,
        column: String,
        value: String,
    },
    #[error("parse error at row {row}: bad timestamp {value:?}")]
    BadTimestamp { row: u64, value: String },
    #[error("adapter is missing a mapping for channel {channel:?}")]
    AdapterMissingChannel { channel: String },
    #[error("duplicate {kind} stream passed to synchronize")]
    DuplicateSensor { kind: &'static str },
    #[error("synchronize needs exactly one stream per sensor; missing {kind}")]
    MissingSensor { kind: &'static str },
    #[error("{kind} stream is empty")]
    EmptyStream { kind: &'static str },
    #[error("no rows survived the timestamp join (tolerance {tolerance_ms} ms)")]
    EmptyJoin { tolerance_ms: i64 },
    #[error("no stream carries activity labels")]
    MissingLabels,
    #[error("invalid synthetic config: {message}")]
    InvalidSynthConfig { message: String },
    #[error(transparent)]
    Data(#[from] DataError),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

/// Errors raised by fusion views and the Kalman filter.
#[derive(Debug, Error)]
pub enum FusionError {
    #[error("sensor selection must not be empty")]
    EmptySensorSet,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid filter configuration: {message}")]
    InvalidConfig { message: String },
    #[error(
        "innovation covariance is not positive definite (pivot {pivot:.3e} at index {index})"
    )]
    NotPositiveDefinite { pivot: f64, index: usize },
    #[error("innovation covariance is ill-conditioned (reciprocal condition {rcond:.3e})")]
    IllConditioned { rcond: f64 },
    #[error("cannot filter an empty dataset")]
    EmptyDataset,
}

/// Errors raised while training or applying classifiers.
#[derive(Debug, Error)]
pub enum ModelError {
    #[error("feature dimension mismatch: model expects {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("training data holds a single class; nothing to separate")]
    SingleClass,
    #[error("invalid hyperparameter: {message}")]
    InvalidHyperparameter { message: String },
    #[error("training needs at least {min} samples, found {n}")]
    TooFewSamples { n: usize, min: usize },
    #[error("features and labels disagree in length: {features} vs {labels}")]
    LengthMismatch { features: usize, labels: usize },
    #[error("ragged feature matrix: row {row} has {got} columns, expected {expected}")]
    RaggedFeatures {
        row: usize,
        got: usize,
        expected: usize,
    },
    #[error("non-finite feature value at row {row}, column {column}")]
    NonFiniteFeature { row: usize, column: usize },
    #[error("three-way vote tie needs one confidence per prediction")]
    MissingConfidence,
    #[error("invalid voting ensemble: {message}")]
    BadEnsemble { message: String },
    #[error("unsupported model document version {found} (expected {expected})")]
    UnsupportedVersion { found: u32, expected: u32 },
    #[error("model document error: {0}")]
    Document(#[from] serde_json::Error),
}

/// Errors raised by the metrics layer.
#[derive(Debug, Error)]
pub enum EvalError {
    #[error("label sequences must be non-empty and equally long ({true_len} vs {pred_len})")]
    LengthMismatch { true_len: usize, pred_len: usize },
    #[error("class index {index} is out of range for {n_classes} classes")]
    ClassOutOfRange { index: usize, n_classes: usize },
    #[error("probability row {row} is malformed: {message}")]
    MalformedProbabilityRow { row: usize, message: String },
    #[error("need at least {min} rows, found {n}")]
    TooFewRows { n: usize, min: usize },
    #[error("histogram needs at least one bin and one value")]
    EmptyHistogramInput,
}
