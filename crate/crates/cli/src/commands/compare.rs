//! `compare`: train every model family on every sensor view plus the
//! two fusion pipelines, then emit one report JSON, one confusion CSV
//! per cell, and an accuracy chart.

use sensorfuse::{feature_fuse, MetricsReport, ModelFamily, SensorKind};

use crate::commands::confusion_csv;
use crate::config::RunConfig;
use crate::error::CliError;
use crate::io::{load_dataset, Artifacts};
use crate::pipeline;
use crate::report::{
    render_report, CompareReport, DecisionCell, GridCell, Hyperparameters, KalmanCell, Protocol,
    REPORT_FORMAT_VERSION, VIEW_SLUGS,
};
use crate::svg::{bar_chart, Bar, BarGroup};

const VIEW_TITLES: [&str; 4] = ["Accelerometer", "Gyroscope", "Magnetometer", "Feature fusion"];

const FAMILY_COLORS: [&str; 3] = ["#4c72b0", "#dd8452", "#55a868"];
const DECISION_COLOR: &str = "#8172b3";
const KALMAN_COLOR: &str = "#937860";

pub fn run(config: &RunConfig) -> Result<(), CliError> {
    let dataset = load_dataset(config)?;
    let split = pipeline::split(&dataset, config)?;
    let train_labels = pipeline::labels_at(&dataset, &split.train_indices);
    let test_labels = pipeline::labels_at(&dataset, &split.test_indices);
    let n_classes = dataset.n_classes();

    // Feature matrices for the four views, computed once.
    let view_sensor_sets: [&[SensorKind]; 4] = [
        &[SensorKind::Accelerometer],
        &[SensorKind::Gyroscope],
        &[SensorKind::Magnetometer],
        &SensorKind::ALL,
    ];
    let mut view_rows = Vec::with_capacity(4);
    for sensors in view_sensor_sets {
        let view = feature_fuse(&dataset, sensors)?;
        view_rows.push((
            view.rows_at(&split.train_indices),
            view.rows_at(&split.test_indices),
        ));
    }

    let mut grid = Vec::with_capacity(12);
    for family in ModelFamily::ALL {
        for (slug, (train_rows, test_rows)) in VIEW_SLUGS.iter().zip(&view_rows) {
            let model = pipeline::fit_base(family, train_rows, &train_labels, config)?;
            let predictions = pipeline::predict_rows(&model, test_rows)?;
            let metrics = pipeline::score(&test_labels, &predictions, n_classes)?;
            grid.push(GridCell {
                model: family.cli_name().to_string(),
                view: slug.to_string(),
                metrics,
            });
        }
    }

    let ensemble =
        pipeline::fit_sensor_vote(config.decision_base, &dataset, &split.train_indices, config)?;
    let vote_predictions = pipeline::predict_votes(&ensemble, &dataset, &split.test_indices)?;
    let decision_metrics = pipeline::score(&test_labels, &vote_predictions, n_classes)?;

    // The state-estimation pipeline: a forest over the filtered columns.
    let filtered = pipeline::filtered_view(&dataset, config)?;
    let filtered_rows = filtered.feature_rows();
    let take = |indices: &[usize]| -> Vec<Vec<f64>> {
        indices
            .iter()
            .map(|&index| filtered_rows[index].clone())
            .collect()
    };
    let kalman_model = pipeline::fit_base(
        ModelFamily::RandomForest,
        &take(&split.train_indices),
        &train_labels,
        config,
    )?;
    let kalman_predictions = pipeline::predict_rows(&kalman_model, &take(&split.test_indices))?;
    let kalman_metrics = pipeline::score(&test_labels, &kalman_predictions, n_classes)?;

    let report = CompareReport {
        format_version: REPORT_FORMAT_VERSION,
        protocol: Protocol {
            dataset_kind: config.dataset_kind.name().to_string(),
            n_rows: dataset.len(),
            n_train: split.train_indices.len(),
            n_test: split.test_indices.len(),
            ratio: config.ratio,
            seed: config.seed,
            labels: dataset.label_names(),
            hyperparameters: Hyperparameters {
                trees: config.trees,
                stages: config.stages,
                eta: config.eta,
                epochs: config.epochs,
                c: config.c,
                q_scale: config.q_scale,
                r_scale: config.r_scale,
                decision_base: config.decision_base.cli_name().to_string(),
            },
        },
        grid,
        decision_fusion: DecisionCell {
            base: config.decision_base.cli_name().to_string(),
            metrics: decision_metrics,
        },
        kalman_fusion: KalmanCell {
            model: ModelFamily::RandomForest.cli_name().to_string(),
            q_scale: config.q_scale,
            r_scale: config.r_scale,
            metrics: kalman_metrics,
        },
    };

    let rendered = render_report(&report)?;
    let chart = accuracy_chart(&report);

    let mut artifacts = Artifacts::new(&config.out);
    artifacts.add("report.json", rendered.into_bytes());
    let labels = dataset.label_names();
    for cell in &report.grid {
        artifacts.add(
            format!("confusion/{}_{}.csv", cell.model, cell.view),
            confusion_csv(&labels, &cell.metrics.confusion)?,
        );
    }
    artifacts.add(
        "confusion/decision_fusion.csv",
        confusion_csv(&labels, &report.decision_fusion.metrics.confusion)?,
    );
    artifacts.add(
        "confusion/kalman_fusion.csv",
        confusion_csv(&labels, &report.kalman_fusion.metrics.confusion)?,
    );
    artifacts.add("accuracy.svg", chart.into_bytes());
    artifacts.commit()?;

    print_summary(&report);
    Ok(())
}

fn cell_accuracy(report: &CompareReport, family: ModelFamily, view: &str) -> f64 {
    report
        .grid
        .iter()
        .find(|cell| cell.model == family.cli_name() && cell.view == view)
        .map(|cell| cell.metrics.accuracy)
        .unwrap_or(0.0)
}

fn accuracy_chart(report: &CompareReport) -> String {
    let mut groups: Vec<BarGroup> = VIEW_SLUGS
        .iter()
        .zip(VIEW_TITLES)
        .map(|(slug, title)| BarGroup {
            label: title.to_string(),
            bars: ModelFamily::ALL
                .iter()
                .zip(FAMILY_COLORS)
                .map(|(&family, color)| Bar {
                    value: cell_accuracy(report, family, slug),
                    color,
                })
                .collect(),
        })
        .collect();
    groups.push(BarGroup {
        label: "Decision fusion".to_string(),
        bars: vec![Bar {
            value: report.decision_fusion.metrics.accuracy,
            color: DECISION_COLOR,
        }],
    });
    groups.push(BarGroup {
        label: "Kalman fusion".to_string(),
        bars: vec![Bar {
            value: report.kalman_fusion.metrics.accuracy,
            color: KALMAN_COLOR,
        }],
    });

    let mut legend: Vec<(String, &'static str)> = ModelFamily::ALL
        .iter()
        .zip(FAMILY_COLORS)
        .map(|(&family, color)| (family.display_name().to_string(), color))
        .collect();
    legend.push((
        format!("Majority vote ({})", report.decision_fusion.base),
        DECISION_COLOR,
    ));
    legend.push((
        format!("Filtered ({})", report.kalman_fusion.model),
        KALMAN_COLOR,
    ));

    bar_chart("Test accuracy by model and view", &groups, &legend)
}

fn print_summary(report: &CompareReport) {
    let show = |metrics: &MetricsReport| {
        format!(
            "accuracy {:.4}, rmse {:.4}",
            metrics.accuracy,
            metrics.rmse.unwrap_or(f64::NAN)
        )
    };
    for cell in &report.grid {
        println!("{:<8} {:<16} {}", cell.model, cell.view, show(&cell.metrics));
    }
    println!(
        "{:<8} {:<16} {}",
        report.decision_fusion.base,
        "decision_fusion",
        show(&report.decision_fusion.metrics)
    );
    println!(
        "{:<8} {:<16} {}",
        report.kalman_fusion.model,
        "kalman_fusion",
        show(&report.kalman_fusion.metrics)
    );
}
