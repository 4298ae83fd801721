//! Multi-sensor activity recognition: dataset ingestion and
//! synchronization, feature / decision / state-estimation fusion,
//! from-scratch classifiers, and evaluation metrics.
//!
//! The crate is organized around a canonical record shape: one row per
//! time step holding nine channels (three axes each from an
//! accelerometer, a gyroscope, and a magnetometer) plus an activity
//! label. [`ingest`] builds such datasets from CSV files, timestamp
//! joins, or a synthetic generator; [`fusion`] derives alternative
//! feature views of them; [`models`] trains classifiers; [`eval`]
//! scores predictions.

pub mod data;
pub mod error;
pub mod eval;
pub mod fusion;
pub mod ingest;
pub mod models;
pub mod rng;

pub use data::{
    encode_labels, encode_labels_with, split_indices, train_test_split, ActivityLabel, Dataset,
    LabelEncoding, SensorKind, SyncRecord, TrainTestSplit, CHANNEL_COLUMNS, CHANNEL_SLUGS,
    LABEL_COLUMN, PRIMARY_ACTIVITIES, TIMESTAMP_COLUMN,
};
pub use error::{DataError, EvalError, FusionError, IngestError, ModelError};
pub use eval::{
    correlation_matrix, histogram, metrics, rmse_hard, rmse_proba, ClassBreakdown, ClassReport,
    ConfusionMatrix, Histogram, MetricsReport,
};
pub use fusion::kalman::{
    filter_dataset, kalman_gain, kalman_predict, kalman_update, FilteredDataset, KalmanConfig,
    KalmanState, DEFAULT_Q_SCALE, DEFAULT_R_SCALE, FILTERED_COLUMNS,
};
pub use fusion::mat::{Ldlt, Mat, RCOND_FLOOR};
pub use fusion::{feature_fuse, FeatureView};
pub use ingest::csv::{
    canonical_csv_bytes, canonical_header, parse_primary_csv, parse_secondary_csv,
    write_canonical_csv, write_filtered_csv, Ingested, ParsedPrimary, SecondaryAdapter,
};
pub use ingest::sync::{synchronize, DEFAULT_TOLERANCE_MS};
pub use ingest::synth::{generate_synthetic, GaussianSpec, SynthConfig};
pub use ingest::{RawSensorStream, StreamLabels};
pub use models::forest::{rf_fit, RandomForestConfig, RandomForestModel};
pub use models::gboost::{gb_fit, softmax, GradientBoostConfig, GradientBoostModel};
pub use models::svm::{svm_fit, LinearSvmConfig, LinearSvmModel, Standardizer};
pub use models::tree::{DecisionTree, TreeNode};
pub use models::{
    majority_vote, BaseModel, ModelFamily, ModelKind, Prediction, SavedModel, SensorMember,
    SensorVoteEnsemble, TrainedView, MODEL_FORMAT_VERSION,
};
pub use rng::{derive_seed, seeded_rng, splitmix64};
