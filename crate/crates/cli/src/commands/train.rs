//! `train`: fit one classifier on the training split and save it as a
//! self-describing JSON model file.

use sensorfuse::{feature_fuse, ModelKind, SavedModel, TrainedView};

use crate::config::{view_sensors, Fusion, RunConfig};
use crate::error::CliError;
use crate::io::{load_dataset, Artifacts};
use crate::pipeline;

pub fn run(config: &RunConfig) -> Result<(), CliError> {
    let dataset = load_dataset(config)?;
    let split = pipeline::split(&dataset, config)?;
    let labels = pipeline::labels_at(&dataset, &split.train_indices);

    let saved = match config.fusion {
        Fusion::None | Fusion::Feature => {
            let sensors = view_sensors(config)?;
            let view = feature_fuse(&dataset, &sensors)?;
            let features = view.rows_at(&split.train_indices);
            let model = pipeline::fit_base(config.model, &features, &labels, config)?;
            SavedModel::new(
                dataset.label_names(),
                TrainedView::Sensors { sensors },
                ModelKind::Base(model),
            )
        }
        Fusion::Decision => {
            view_sensors(config)?;
            let ensemble =
                pipeline::fit_sensor_vote(config.model, &dataset, &split.train_indices, config)?;
            SavedModel::new(
                dataset.label_names(),
                TrainedView::Decision,
                ModelKind::SensorVote(ensemble),
            )
        }
        Fusion::Kalman => {
            let filtered = pipeline::filtered_view(&dataset, config)?;
            let rows = filtered.feature_rows();
            let features: Vec<Vec<f64>> = split
                .train_indices
                .iter()
                .map(|&index| rows[index].clone())
                .collect();
            let model = pipeline::fit_base(config.model, &features, &labels, config)?;
            SavedModel::new(
                dataset.label_names(),
                TrainedView::Kalman {
                    q_scale: config.q_scale,
                    r_scale: config.r_scale,
                },
                ModelKind::Base(model),
            )
        }
    };

    let mut text = saved.to_json()?;
    text.push('\n');
    let mut artifacts = Artifacts::new(&config.out);
    artifacts.add("model.json", text.into_bytes());
    artifacts.commit()?;
    println!(
        "trained {} on {} rows ({} classes)",
        config.model.display_name(),
        split.train_indices.len(),
        dataset.n_classes()
    );
    Ok(())
}
