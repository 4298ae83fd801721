//! Training and scoring steps shared by the train, eval, and compare
//! subcommands.

use sensorfuse::{
    feature_fuse, filter_dataset, gb_fit, metrics, rf_fit, rmse_hard, rmse_proba, svm_fit,
    train_test_split, BaseModel, ConfusionMatrix, Dataset, FilteredDataset, GradientBoostConfig,
    KalmanConfig, LinearSvmConfig, MetricsReport, ModelFamily, Prediction, RandomForestConfig,
    SensorKind, SensorMember, SensorVoteEnsemble, TrainTestSplit,
};

use crate::args::SplitArg;
use crate::config::RunConfig;
use crate::error::CliError;

/// Fits one family on an in-memory feature matrix using the run's
/// hyperparameters. The boosting tree depth is fixed at 3.
pub fn fit_base(
    family: ModelFamily,
    features: &[Vec<f64>],
    labels: &[usize],
    config: &RunConfig,
) -> Result<BaseModel, CliError> {
    let model = match family {
        ModelFamily::LinearSvm => BaseModel::LinearSvm(svm_fit(
            features,
            labels,
            &LinearSvmConfig {
                c: config.c,
                epochs: config.epochs,
                seed: config.seed,
            },
        )?),
        ModelFamily::GradientBoost => BaseModel::GradientBoost(gb_fit(
            features,
            labels,
            &GradientBoostConfig {
                n_stages: config.stages,
                learning_rate: config.eta,
                tree_depth: 3,
                min_samples_leaf: 1,
                seed: config.seed,
            },
        )?),
        ModelFamily::RandomForest => BaseModel::RandomForest(rf_fit(
            features,
            labels,
            &RandomForestConfig {
                n_trees: config.trees,
                max_depth: None,
                min_samples_leaf: 1,
                seed: config.seed,
            },
        )?),
    };
    Ok(model)
}

/// One prediction per feature row.
pub fn predict_rows(model: &BaseModel, rows: &[Vec<f64>]) -> Result<Vec<Prediction>, CliError> {
    rows.iter()
        .map(|row| model.predict_full(row).map_err(CliError::from))
        .collect()
}

/// Trains one model per sensor and wires them into a voting ensemble.
pub fn fit_sensor_vote(
    family: ModelFamily,
    dataset: &Dataset,
    train_indices: &[usize],
    config: &RunConfig,
) -> Result<SensorVoteEnsemble, CliError> {
    let labels = labels_at(dataset, train_indices);
    let mut members = Vec::with_capacity(3);
    for sensor in SensorKind::ALL {
        let view = feature_fuse(dataset, &[sensor])?;
        let features = view.rows_at(train_indices);
        let model = fit_base(family, &features, &labels, config)?;
        members.push(SensorMember { sensor, model });
    }
    SensorVoteEnsemble::new(members).map_err(CliError::from)
}

/// One ensemble prediction per selected dataset row.
pub fn predict_votes(
    ensemble: &SensorVoteEnsemble,
    dataset: &Dataset,
    indices: &[usize],
) -> Result<Vec<Prediction>, CliError> {
    indices
        .iter()
        .map(|&index| {
            ensemble
                .predict_record(&dataset.rows()[index])
                .map_err(CliError::from)
        })
        .collect()
}

/// Runs the filter with the run's noise scales.
pub fn filtered_view(dataset: &Dataset, config: &RunConfig) -> Result<FilteredDataset, CliError> {
    let kalman = KalmanConfig::stacked(config.q_scale, config.r_scale);
    filter_dataset(dataset, &kalman).map_err(CliError::from)
}

/// Label indices of the selected rows.
pub fn labels_at(dataset: &Dataset, indices: &[usize]) -> Vec<usize> {
    let all = dataset.label_indices();
    indices.iter().map(|&index| all[index]).collect()
}

/// Scores predictions against true labels. The error term is the RMSE
/// of predicted class probabilities when every prediction carries a
/// distribution, and of one-hot votes otherwise.
pub fn score(
    y_true: &[usize],
    predictions: &[Prediction],
    n_classes: usize,
) -> Result<MetricsReport, CliError> {
    let y_pred: Vec<usize> = predictions.iter().map(|p| p.class).collect();
    let rmse = if predictions.iter().all(|p| p.probabilities.is_some()) {
        let rows: Vec<Vec<f64>> = predictions
            .iter()
            .map(|p| {
                let mut row = p.probabilities.clone().expect("checked above");
                // Distributions narrower than the label vocabulary can
                // happen when a class is absent from the training split.
                row.resize(n_classes, 0.0);
                row
            })
            .collect();
        rmse_proba(&rows, y_true)?
    } else {
        rmse_hard(y_true, &y_pred, n_classes)?
    };
    let confusion = ConfusionMatrix::from_predictions(y_true, &y_pred, n_classes)?;
    Ok(metrics(&confusion, Some(rmse)))
}

/// The seeded split used by every training command.
pub fn split(dataset: &Dataset, config: &RunConfig) -> Result<TrainTestSplit, CliError> {
    train_test_split(dataset, config.ratio, config.seed).map_err(CliError::from)
}

/// Rows scored by the eval subcommand.
pub fn eval_indices(split: &TrainTestSplit, side: SplitArg, n: usize) -> Vec<usize> {
    match side {
        SplitArg::Train => split.train_indices.clone(),
        SplitArg::Test => split.test_indices.clone(),
        SplitArg::All => (0..n).collect(),
    }
}
