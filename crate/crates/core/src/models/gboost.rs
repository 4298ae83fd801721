//! Multiclass gradient boosting: one shallow regression tree per class
//! per stage, fit to softmax residuals.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::models::tree::{DecisionTree, RegressionGrow};
use crate::models::{validate_training_input, Prediction};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GradientBoostConfig {
    pub n_stages: usize,
    pub learning_rate: f64,
    pub tree_depth: usize,
    pub min_samples_leaf: usize,
    pub seed: u64,
}

impl GradientBoostConfig {
    pub fn new(seed: u64) -> Self {
        GradientBoostConfig {
            n_stages: 100,
            learning_rate: 0.1,
            tree_depth: 3,
            min_samples_leaf: 1,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradientBoostModel {
    /// `stages[m][k]` is stage m's tree for class k.
    stages: Vec<Vec<DecisionTree<f64>>>,
    n_features: usize,
    n_classes: usize,
    /// Mean multiclass log-loss after 0, 1, ..., M stages.
    train_loss: Vec<f64>,
    config: GradientBoostConfig,
}

/// Numerically stable softmax: subtracts the max score before
/// exponentiating.
pub fn softmax(scores: &[f64]) -> Vec<f64> {
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = scores.iter().map(|&s| (s - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.iter().map(|&e| e / sum).collect()
}

/// Mean log-loss of score rows against true labels, evaluated through
/// the log-sum-exp identity so extreme scores cannot overflow.
fn mean_log_loss(scores: &[Vec<f64>], labels: &[usize]) -> f64 {
    let total: f64 = scores
        .iter()
        .zip(labels)
        .map(|(row, &y)| {
            let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let lse = max + row.iter().map(|&s| (s - max).exp()).sum::<f64>().ln();
            lse - row[y]
        })
        .sum();
    total / labels.len() as f64
}

/// Boosts from all-zero scores: each stage computes softmax residuals
/// (one-hot minus probability) per class, fits a depth-limited
/// squared-error tree to them, and adds `learning_rate` times its output
/// to the running scores. A zero learning rate is allowed and leaves the
/// scores unchanged.
pub fn gb_fit(
    features: &[Vec<f64>],
    labels: &[usize],
    config: &GradientBoostConfig,
) -> Result<GradientBoostModel, ModelError> {
    let (n, d, n_classes) = validate_training_input(features, labels)?;
    if config.n_stages == 0 {
        return Err(ModelError::InvalidHyperparameter {
            message: "n_stages must be at least 1".into(),
        });
    }
    if !(config.learning_rate.is_finite() && config.learning_rate >= 0.0) {
        return Err(ModelError::InvalidHyperparameter {
            message: "learning_rate must be finite and non-negative".into(),
        });
    }
    if config.tree_depth == 0 {
        return Err(ModelError::InvalidHyperparameter {
            message: "tree_depth must be at least 1".into(),
        });
    }
    if config.min_samples_leaf == 0 {
        return Err(ModelError::InvalidHyperparameter {
            message: "min_samples_leaf must be at least 1".into(),
        });
    }
    let indices: Vec<usize> = (0..n).collect();
    let mut scores = vec![vec![0.0f64; n_classes]; n];
    let mut train_loss = Vec::with_capacity(config.n_stages + 1);
    train_loss.push(mean_log_loss(&scores, labels));
    let mut stages = Vec::with_capacity(config.n_stages);
    let mut residuals = vec![vec![0.0f64; n]; n_classes];
    for _ in 0..config.n_stages {
        for (i, row) in scores.iter().enumerate() {
            let p = softmax(row);
            for k in 0..n_classes {
                let target = if labels[i] == k { 1.0 } else { 0.0 };
                residuals[k][i] = target - p[k];
            }
        }
        let stage: Vec<DecisionTree<f64>> = residuals
            .par_iter()
            .map(|targets| {
                RegressionGrow {
                    features,
                    targets,
                    max_depth: Some(config.tree_depth),
                    min_samples_leaf: config.min_samples_leaf,
                }
                .grow(&indices)
            })
            .collect();
        for (i, row) in scores.iter_mut().enumerate() {
            for (k, tree) in stage.iter().enumerate() {
                row[k] += config.learning_rate * tree.apply(&features[i]);
            }
        }
        train_loss.push(mean_log_loss(&scores, labels));
        stages.push(stage);
    }
    Ok(GradientBoostModel {
        stages,
        n_features: d,
        n_classes,
        train_loss,
        config: *config,
    })
}

impl GradientBoostModel {
    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn n_stages(&self) -> usize {
        self.stages.len()
    }

    pub fn config(&self) -> &GradientBoostConfig {
        &self.config
    }

    /// Mean training log-loss after each stage, starting with the
    /// untrained (all-zero score) model; length is `n_stages + 1`.
    pub fn train_loss(&self) -> &[f64] {
        &self.train_loss
    }

    /// Accumulated raw scores per class.
    pub fn scores(&self, x: &[f64]) -> Result<Vec<f64>, ModelError> {
        if x.len() != self.n_features {
            return Err(ModelError::DimensionMismatch {
                expected: self.n_features,
                got: x.len(),
            });
        }
        let mut scores = vec![0.0f64; self.n_classes];
        for stage in &self.stages {
            for (k, tree) in stage.iter().enumerate() {
                scores[k] += self.config.learning_rate * tree.apply(x);
            }
        }
        Ok(scores)
    }

    pub fn predict_proba(&self, x: &[f64]) -> Result<Vec<f64>, ModelError> {
        Ok(softmax(&self.scores(x)?))
    }

    /// Highest softmax probability wins; ties break to the lowest class
    /// index. Confidence is that probability.
    pub fn predict_full(&self, x: &[f64]) -> Result<Prediction, ModelError> {
        let proba = self.predict_proba(x)?;
        let mut best = 0;
        for (class, &p) in proba.iter().enumerate() {
            if p > proba[best] {
                best = class;
            }
        }
        Ok(Prediction {
            class: best,
            confidence: proba[best],
            probabilities: Some(proba),
        })
    }

    pub fn predict(&self, x: &[f64]) -> Result<usize, ModelError> {
        Ok(self.predict_full(x)?.class)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn blobs() -> (Vec<Vec<f64>>, Vec<usize>) {
        let mut features = Vec::new();
        let mut labels = Vec::new();
        for i in 0..25 {
            let w = (i % 5) as f64 * 0.02;
            features.push(vec![0.0 + w, 1.0 - w]);
            labels.push(0);
            features.push(vec![4.0 - w, -3.0 + w]);
            labels.push(1);
            features.push(vec![-4.0 + w, -3.0 - w]);
            labels.push(2);
        }
        (features, labels)
    }

    #[test]
    fn softmax_matches_hand_computed_example() {
        let p = softmax(&[2.0f64.ln(), 0.0, 0.0, 0.0]);
        assert!((p[0] - 0.4).abs() < 1e-12);
        for &v in &p[1..] {
            assert!((v - 0.2).abs() < 1e-12);
        }
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn softmax_survives_extreme_scores() {
        let p = softmax(&[1e4, 0.0, -1e4]);
        assert!(p.iter().all(|v| v.is_finite()));
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert!(p[0] > 0.999);
    }

    #[test]
    fn boosting_fits_separable_classes() {
        let (features, labels) = blobs();
        let model = gb_fit(&features, &labels, &GradientBoostConfig::new(0)).unwrap();
        for (x, label) in features.iter().zip(&labels) {
            assert_eq!(model.predict(x).unwrap(), *label);
        }
        let p = model.predict_proba(&features[0]).unwrap();
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert!(p[0] > 0.8);
    }

    #[test]
    fn train_loss_starts_at_ln_k_and_never_increases() {
        let (features, labels) = blobs();
        let model = gb_fit(&features, &labels, &GradientBoostConfig::new(0)).unwrap();
        let loss = model.train_loss();
        assert_eq!(loss.len(), model.n_stages() + 1);
        assert!((loss[0] - 3.0f64.ln()).abs() < 1e-12);
        for pair in loss.windows(2) {
            assert!(pair[1] <= pair[0] + 1e-9);
        }
        assert!(*loss.last().unwrap() < 0.1);
    }

    #[test]
    fn zero_learning_rate_changes_nothing() {
        let (features, labels) = blobs();
        let config = GradientBoostConfig {
            n_stages: 3,
            learning_rate: 0.0,
            ..GradientBoostConfig::new(0)
        };
        let model = gb_fit(&features, &labels, &config).unwrap();
        let loss = model.train_loss();
        for &l in loss {
            assert!((l - 3.0f64.ln()).abs() < 1e-12);
        }
        // Uniform probabilities tie; prediction falls to class 0.
        assert_eq!(model.predict(&features[1]).unwrap(), 0);
    }

    #[test]
    fn rejects_bad_hyperparameters() {
        let (features, labels) = blobs();
        for config in [
            GradientBoostConfig {
                n_stages: 0,
                ..GradientBoostConfig::new(0)
            },
            GradientBoostConfig {
                learning_rate: -0.1,
                ..GradientBoostConfig::new(0)
            },
            GradientBoostConfig {
                learning_rate: f64::NAN,
                ..GradientBoostConfig::new(0)
            },
            GradientBoostConfig {
                tree_depth: 0,
                ..GradientBoostConfig::new(0)
            },
        ] {
            assert!(matches!(
                gb_fit(&features, &labels, &config),
                Err(ModelError::InvalidHyperparameter { .. })
            ));
        }
    }

    #[test]
    fn training_is_deterministic() {
        let (features, labels) = blobs();
        let a = gb_fit(&features, &labels, &GradientBoostConfig::new(0)).unwrap();
        let b = gb_fit(&features, &labels, &GradientBoostConfig::new(0)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn scores_check_width() {
        let (features, labels) = blobs();
        let model = gb_fit(&features, &labels, &GradientBoostConfig::new(0)).unwrap();
        assert!(model.scores(&[1.0]).is_err());
    }
}
