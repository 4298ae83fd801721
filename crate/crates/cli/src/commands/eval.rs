//! `eval`: score a saved model on one side of a seeded dataset split
//! and write the resulting metrics report.

use std::fs;
use std::path::Path;

use sensorfuse::{
    feature_fuse, filter_dataset, KalmanConfig, ModelKind, SavedModel, TrainedView,
};

use crate::args::SplitArg;
use crate::config::RunConfig;
use crate::error::CliError;
use crate::io::{load_dataset, Artifacts};
use crate::pipeline;

pub fn run(config: &RunConfig, model_file: &Path, side: SplitArg) -> Result<(), CliError> {
    let text = fs::read_to_string(model_file).map_err(|err| CliError::read(model_file, err))?;
    let saved = SavedModel::from_json(&text)?;

    let dataset = load_dataset(config)?;
    if saved.labels != dataset.label_names() {
        return Err(CliError::Input(format!(
            "label vocabulary mismatch: the model knows {:?} but the dataset holds {:?}",
            saved.labels,
            dataset.label_names()
        )));
    }

    let split = pipeline::split(&dataset, config)?;
    let indices = pipeline::eval_indices(&split, side, dataset.len());
    let y_true = pipeline::labels_at(&dataset, &indices);

    let predictions = match (&saved.view, &saved.model) {
        (TrainedView::Sensors { sensors }, ModelKind::Base(model)) => {
            let view = feature_fuse(&dataset, sensors)?;
            pipeline::predict_rows(model, &view.rows_at(&indices))?
        }
        (TrainedView::Decision, ModelKind::SensorVote(ensemble)) => {
            pipeline::predict_votes(ensemble, &dataset, &indices)?
        }
        (TrainedView::Kalman { q_scale, r_scale }, ModelKind::Base(model)) => {
            let filtered = filter_dataset(&dataset, &KalmanConfig::stacked(*q_scale, *r_scale))?;
            let rows = filtered.feature_rows();
            let features: Vec<Vec<f64>> =
                indices.iter().map(|&index| rows[index].clone()).collect();
            pipeline::predict_rows(model, &features)?
        }
        _ => {
            return Err(CliError::Input(
                "model file pairs a view with an incompatible model kind".into(),
            ))
        }
    };

    let report = pipeline::score(&y_true, &predictions, dataset.n_classes())?;
    let mut text = serde_json::to_string_pretty(&report)
        .map_err(|err| CliError::Runtime(format!("cannot render metrics: {err}")))?;
    text.push('\n');

    let mut artifacts = Artifacts::new(&config.out);
    artifacts.add("metrics.json", text.into_bytes());
    artifacts.commit()?;
    println!(
        "scored {} rows: accuracy {:.4}, weighted F1 {:.4}",
        report.n, report.accuracy, report.f1_weighted
    );
    Ok(())
}
