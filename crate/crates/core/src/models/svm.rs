//! One-vs-rest linear SVM trained with Pegasos-style stochastic
//! subgradient descent on the hinge loss.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use rand::seq::SliceRandom;

use crate::error::ModelError;
use crate::models::{validate_training_input, Prediction};
use crate::rng::{derive_seed, seeded_rng};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearSvmConfig {
    /// Inverse regularization strength; the ridge weight is 1/(c·N).
    pub c: f64,
    pub epochs: usize,
    pub seed: u64,
}

impl LinearSvmConfig {
    pub fn new(seed: u64) -> Self {
        LinearSvmConfig {
            c: 1.0,
            epochs: 200,
            seed,
        }
    }
}

/// Per-column z-score parameters fitted on training data. Columns with
/// zero variance divide by 1 so they map to zero instead of NaN.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    means: Vec<f64>,
    stds: Vec<f64>,
}

impl Standardizer {
    pub fn fit(features: &[Vec<f64>]) -> Standardizer {
        let n = features.len() as f64;
        let d = features.first().map_or(0, Vec::len);
        let mut means = vec![0.0; d];
        for row in features {
            for (m, &v) in means.iter_mut().zip(row) {
                *m += v;
            }
        }
        means.iter_mut().for_each(|m| *m /= n);
        let mut stds = vec![0.0; d];
        for row in features {
            for ((s, &v), &m) in stds.iter_mut().zip(row).zip(&means) {
                *s += (v - m) * (v - m);
            }
        }
        for s in &mut stds {
            *s = (*s / n).sqrt();
            if *s == 0.0 {
                *s = 1.0;
            }
        }
        Standardizer { means, stds }
    }

    pub fn transform(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(&self.means)
            .zip(&self.stds)
            .map(|((&v, &m), &s)| (v - m) / s)
            .collect()
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn stds(&self) -> &[f64] {
        &self.stds
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Hyperplane {
    weights: Vec<f64>,
    bias: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearSvmModel {
    standardizer: Standardizer,
    planes: Vec<Hyperplane>,
    n_features: usize,
    config: LinearSvmConfig,
}

/// Trains one binary hinge-loss separator per class against the rest.
/// Inputs are z-scored first; class k's pass visits the data in a fresh
/// shuffled order each epoch, driven by `derive_seed(seed, k)`. The
/// step size is 1/(λ·(t + N)) at update t; the one-epoch offset keeps
/// the first steps at O(C) instead of O(C·N), and after each update the
/// weights are projected onto the ‖w‖ ≤ 1/√λ ball that contains the
/// ridge-penalized optimum.
pub fn svm_fit(
    features: &[Vec<f64>],
    labels: &[usize],
    config: &LinearSvmConfig,
) -> Result<LinearSvmModel, ModelError> {
    let (n, d, n_classes) = validate_training_input(features, labels)?;
    if !(config.c.is_finite() && config.c > 0.0) {
        return Err(ModelError::InvalidHyperparameter {
            message: "c must be positive and finite".into(),
        });
    }
    if config.epochs == 0 {
        return Err(ModelError::InvalidHyperparameter {
            message: "epochs must be at least 1".into(),
        });
    }
    let standardizer = Standardizer::fit(features);
    let scaled: Vec<Vec<f64>> = features.iter().map(|x| standardizer.transform(x)).collect();
    let lambda = 1.0 / (config.c * n as f64);
    let radius = 1.0 / lambda.sqrt();
    let planes: Vec<Hyperplane> = (0..n_classes)
        .into_par_iter()
        .map(|k| {
            let mut rng = seeded_rng(derive_seed(config.seed, k as u64));
            let targets: Vec<f64> = labels
                .iter()
                .map(|&y| if y == k { 1.0 } else { -1.0 })
                .collect();
            let mut w = vec![0.0; d];
            let mut b = 0.0;
            let mut order: Vec<usize> = (0..n).collect();
            let mut t = n as u64;
            for _ in 0..config.epochs {
                order.shuffle(&mut rng);
                for &i in &order {
                    t += 1;
                    let eta = 1.0 / (lambda * t as f64);
                    let y = targets[i];
                    let x = &scaled[i];
                    let margin = y * (dot(&w, x) + b);
                    // Shrink by (1 − ηλ) = (1 − 1/t), then step on the
                    // hinge subgradient when the margin is violated.
                    let keep = 1.0 - 1.0 / t as f64;
                    if margin < 1.0 {
                        for (wj, &xj) in w.iter_mut().zip(x) {
                            *wj = keep * *wj + eta * y * xj;
                        }
                        b += eta * y;
                        let norm = dot(&w, &w).sqrt();
                        if norm > radius {
                            let cap = radius / norm;
                            w.iter_mut().for_each(|wj| *wj *= cap);
                        }
                    } else {
                        w.iter_mut().for_each(|wj| *wj *= keep);
                    }
                }
            }
            Hyperplane { weights: w, bias: b }
        })
        .collect();
    Ok(LinearSvmModel {
        standardizer,
        planes,
        n_features: d,
        config: *config,
    })
}

impl LinearSvmModel {
    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn n_classes(&self) -> usize {
        self.planes.len()
    }

    pub fn config(&self) -> &LinearSvmConfig {
        &self.config
    }

    pub fn standardizer(&self) -> &Standardizer {
        &self.standardizer
    }

    /// Signed distance surrogate w·z + b per class, on standardized
    /// inputs.
    pub fn decision_values(&self, x: &[f64]) -> Result<Vec<f64>, ModelError> {
        if x.len() != self.n_features {
            return Err(ModelError::DimensionMismatch {
                expected: self.n_features,
                got: x.len(),
            });
        }
        let z = self.standardizer.transform(x);
        Ok(self
            .planes
            .iter()
            .map(|p| dot(&p.weights, &z) + p.bias)
            .collect())
    }

    /// Highest decision value wins; ties break to the lowest class
    /// index. Confidence is the winning decision value; no probability
    /// estimates are produced.
    pub fn predict_full(&self, x: &[f64]) -> Result<Prediction, ModelError> {
        let values = self.decision_values(x)?;
        let mut best = 0;
        for (class, &v) in values.iter().enumerate() {
            if v > values[best] {
                best = class;
            }
        }
        Ok(Prediction {
            class: best,
            confidence: values[best],
            probabilities: None,
        })
    }

    pub fn predict(&self, x: &[f64]) -> Result<usize, ModelError> {
        Ok(self.predict_full(x)?.class)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn blobs() -> (Vec<Vec<f64>>, Vec<usize>) {
        let mut features = Vec::new();
        let mut labels = Vec::new();
        for i in 0..40 {
            let w = (i % 7) as f64 * 0.05;
            features.push(vec![1.0 + w, 1.0 - w]);
            labels.push(0);
            features.push(vec![-1.0 - w, -1.0 + w]);
            labels.push(1);
        }
        (features, labels)
    }

    #[test]
    fn standardizer_zero_variance_column_maps_to_zero() {
        let features = vec![vec![5.0, 1.0], vec![5.0, 3.0]];
        let s = Standardizer::fit(&features);
        assert_eq!(s.stds()[0], 1.0);
        let z = s.transform(&[5.0, 2.0]);
        assert_eq!(z[0], 0.0);
        assert!(z[1].abs() < 1e-12);
    }

    #[test]
    fn standardizer_zscores_columns() {
        let features = vec![vec![0.0], vec![2.0], vec![4.0]];
        let s = Standardizer::fit(&features);
        assert!((s.means()[0] - 2.0).abs() < 1e-12);
        // Population standard deviation of {0,2,4} is sqrt(8/3).
        assert!((s.stds()[0] - (8.0f64 / 3.0).sqrt()).abs() < 1e-12);
        let z = s.transform(&[4.0]);
        assert!((z[0] - 2.0 / (8.0f64 / 3.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn svm_separates_two_blobs() {
        let (features, labels) = blobs();
        let model = svm_fit(&features, &labels, &LinearSvmConfig::new(3)).unwrap();
        for (x, label) in features.iter().zip(&labels) {
            assert_eq!(model.predict(x).unwrap(), *label);
        }
        let p = model.predict_full(&[1.0, 1.0]).unwrap();
        assert_eq!(p.class, 0);
        assert!(p.probabilities.is_none());
        assert!(p.confidence > 0.0);
    }

    #[test]
    fn svm_handles_three_classes() {
        let mut features = Vec::new();
        let mut labels = Vec::new();
        for i in 0..30 {
            let w = (i % 5) as f64 * 0.03;
            features.push(vec![2.0 + w, 0.0 + w]);
            labels.push(0);
            features.push(vec![-2.0 - w, 2.0 - w]);
            labels.push(1);
            features.push(vec![0.0 + w, -3.0 + w]);
            labels.push(2);
        }
        let model = svm_fit(&features, &labels, &LinearSvmConfig::new(17)).unwrap();
        let hits = features
            .iter()
            .zip(&labels)
            .filter(|(x, &y)| model.predict(x).unwrap() == y)
            .count();
        assert!(hits as f64 / labels.len() as f64 >= 0.99);
        assert_eq!(model.decision_values(&[0.0, 0.0]).unwrap().len(), 3);
    }

    #[test]
    fn training_is_deterministic() {
        let (features, labels) = blobs();
        let a = svm_fit(&features, &labels, &LinearSvmConfig::new(5)).unwrap();
        let b = svm_fit(&features, &labels, &LinearSvmConfig::new(5)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_bad_hyperparameters() {
        let (features, labels) = blobs();
        let mut config = LinearSvmConfig::new(0);
        config.c = 0.0;
        assert!(matches!(
            svm_fit(&features, &labels, &config),
            Err(ModelError::InvalidHyperparameter { .. })
        ));
        let mut config = LinearSvmConfig::new(0);
        config.epochs = 0;
        assert!(matches!(
            svm_fit(&features, &labels, &config),
            Err(ModelError::InvalidHyperparameter { .. })
        ));
    }

    #[test]
    fn predict_checks_width() {
        let (features, labels) = blobs();
        let model = svm_fit(&features, &labels, &LinearSvmConfig::new(0)).unwrap();
        assert!(model.decision_values(&[1.0]).is_err());
    }
}
