//! The comparison report: one JSON document holding the full
//! model-by-view metric grid plus the two fusion pipelines. Every
//! report is checked against the committed JSON schema before it is
//! written, so downstream consumers can rely on the published shape.

use serde::Serialize;

use sensorfuse::MetricsReport;

use crate::error::CliError;

/// Schema the report is validated against; committed at the repo root.
pub const REPORT_SCHEMA: &str = include_str!("../../../schemas/compare-report.schema.json");

pub const REPORT_FORMAT_VERSION: u32 = 1;

/// View identifiers used in grid cells and confusion file names.
pub const VIEW_SLUGS: [&str; 4] = [
    "accelerometer",
    "gyroscope",
    "magnetometer",
    "feature_fusion",
];

#[derive(Debug, Serialize)]
pub struct CompareReport {
    pub format_version: u32,
    pub protocol: Protocol,
    /// Model-by-view cells, families in fixed report order.
    pub grid: Vec<GridCell>,
    pub decision_fusion: DecisionCell,
    pub kalman_fusion: KalmanCell,
}

#[derive(Debug, Serialize)]
pub struct Protocol {
    pub dataset_kind: String,
    pub n_rows: usize,
    pub n_train: usize,
    pub n_test: usize,
    pub ratio: f64,
    pub seed: u64,
    pub labels: Vec<String>,
    pub hyperparameters: Hyperparameters,
}

#[derive(Debug, Serialize)]
pub struct Hyperparameters {
    pub trees: usize,
    pub stages: usize,
    pub eta: f64,
    pub epochs: usize,
    pub c: f64,
    pub q_scale: f64,
    pub r_scale: f64,
    pub decision_base: String,
}

#[derive(Debug, Serialize)]
pub struct GridCell {
    pub model: String,
    pub view: String,
    pub metrics: MetricsReport,
}

#[derive(Debug, Serialize)]
pub struct DecisionCell {
    pub base: String,
    pub metrics: MetricsReport,
}

#[derive(Debug, Serialize)]
pub struct KalmanCell {
    pub model: String,
    pub q_scale: f64,
    pub r_scale: f64,
    pub metrics: MetricsReport,
}

/// Serializes the report and proves it against [`REPORT_SCHEMA`].
/// A violation is an internal consistency failure, not a user error.
pub fn render_report(report: &CompareReport) -> Result<String, CliError> {
    let value = serde_json::to_value(report)
        .map_err(|err| CliError::Runtime(format!("cannot serialize report: {err}")))?;
    let schema: serde_json::Value = serde_json::from_str(REPORT_SCHEMA)
        .map_err(|err| CliError::Runtime(format!("embedded report schema is not JSON: {err}")))?;
    let validator = jsonschema::validator_for(&schema)
        .map_err(|err| CliError::Runtime(format!("embedded report schema is invalid: {err}")))?;
    let violations: Vec<String> = validator
        .iter_errors(&value)
        .map(|err| format!("{}: {err}", err.instance_path()))
        .collect();
    if !violations.is_empty() {
        return Err(CliError::Runtime(format!(
            "report does not match its schema: {}",
            violations.join("; ")
        )));
    }
    let mut text = serde_json::to_string_pretty(&value)
        .map_err(|err| CliError::Runtime(format!("cannot render report: {err}")))?;
    text.push('\n');
    Ok(text)
}
