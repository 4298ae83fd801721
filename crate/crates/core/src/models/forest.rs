//! Random forest: bagged Gini trees with per-node feature subsampling.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::models::tree::{ClassificationGrow, DecisionTree};
use crate::models::{validate_training_input, Prediction};
use crate::rng::{derive_seed, seeded_rng};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RandomForestConfig {
    pub n_trees: usize,
    /// `None` grows each tree until its leaves are pure.
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
    pub seed: u64,
}

impl RandomForestConfig {
    pub fn new(seed: u64) -> Self {
        RandomForestConfig {
            n_trees: 100,
            max_depth: None,
            min_samples_leaf: 1,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomForestModel {
    trees: Vec<DecisionTree<usize>>,
    n_features: usize,
    n_classes: usize,
    config: RandomForestConfig,
}

/// Trains `n_trees` independent trees. Tree `i` draws a bootstrap sample
/// of size N and its feature subsets from a generator seeded by
/// `derive_seed(seed, i)`, so the result is identical at any thread
/// count; each split examines floor(sqrt(d)) randomly chosen features
/// (at least one).
pub fn rf_fit(
    features: &[Vec<f64>],
    labels: &[usize],
    config: &RandomForestConfig,
) -> Result<RandomForestModel, ModelError> {
    let (n, d, n_classes) = validate_training_input(features, labels)?;
    if config.n_trees == 0 {
        return Err(ModelError::InvalidHyperparameter {
            message: "n_trees must be at least 1".into(),
        });
    }
    if config.min_samples_leaf == 0 {
        return Err(ModelError::InvalidHyperparameter {
            message: "min_samples_leaf must be at least 1".into(),
        });
    }
    let feature_subsample = ((d as f64).sqrt().floor() as usize).max(1);
    let grower = ClassificationGrow {
        features,
        labels,
        n_classes,
        max_depth: config.max_depth,
        min_samples_leaf: config.min_samples_leaf,
        feature_subsample: Some(feature_subsample),
    };
    let trees: Vec<DecisionTree<usize>> = (0..config.n_trees)
        .into_par_iter()
        .map(|i| {
            let mut rng = seeded_rng(derive_seed(config.seed, i as u64));
            let indices: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
            grower.grow(&indices, &mut rng)
        })
        .collect();
    Ok(RandomForestModel {
        trees,
        n_features: d,
        n_classes,
        config: *config,
    })
}

impl RandomForestModel {
    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn n_trees(&self) -> usize {
        self.trees.len()
    }

    pub fn config(&self) -> &RandomForestConfig {
        &self.config
    }

    /// Raw vote counts per class; sums to `n_trees`.
    pub fn predict_votes(&self, x: &[f64]) -> Result<Vec<usize>, ModelError> {
        if x.len() != self.n_features {
            return Err(ModelError::DimensionMismatch {
                expected: self.n_features,
                got: x.len(),
            });
        }
        let mut votes = vec![0usize; self.n_classes];
        for tree in &self.trees {
            votes[tree.apply(x)] += 1;
        }
        Ok(votes)
    }

    /// Plurality class, confidence = winning vote fraction, and the full
    /// vote-fraction vector as the probability estimate. Vote ties break
    /// to the lowest class index.
    pub fn predict_full(&self, x: &[f64]) -> Result<Prediction, ModelError> {
        let votes = self.predict_votes(x)?;
        let mut best = 0;
        for (class, &count) in votes.iter().enumerate() {
            if count > votes[best] {
                best = class;
            }
        }
        let total = self.trees.len() as f64;
        let fractions: Vec<f64> = votes.iter().map(|&v| v as f64 / total).collect();
        Ok(Prediction {
            class: best,
            confidence: fractions[best],
            probabilities: Some(fractions),
        })
    }

    pub fn predict(&self, x: &[f64]) -> Result<usize, ModelError> {
        Ok(self.predict_full(x)?.class)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_blob_data(n_per: usize) -> (Vec<Vec<f64>>, Vec<usize>) {
        // Deterministic, well-separated blobs on a lattice.
        let mut features = Vec::new();
        let mut labels = Vec::new();
        for i in 0..n_per {
            let wobble = (i % 5) as f64 * 0.01;
            features.push(vec![0.0 + wobble, 1.0 - wobble, wobble]);
            labels.push(0);
            features.push(vec![10.0 - wobble, -9.0 + wobble, 5.0 + wobble]);
            labels.push(1);
        }
        (features, labels)
    }

    #[test]
    fn forest_separates_distant_blobs() {
        let (features, labels) = two_blob_data(30);
        let model = rf_fit(&features, &labels, &RandomForestConfig::new(42)).unwrap();
        assert_eq!(model.n_trees(), 100);
        assert_eq!(model.n_classes(), 2);
        for (x, label) in features.iter().zip(&labels) {
            assert_eq!(model.predict(x).unwrap(), *label);
        }
    }

    #[test]
    fn votes_sum_to_tree_count() {
        let (features, labels) = two_blob_data(10);
        let config = RandomForestConfig {
            n_trees: 37,
            ..RandomForestConfig::new(7)
        };
        let model = rf_fit(&features, &labels, &config).unwrap();
        let votes = model.predict_votes(&[0.0, 1.0, 0.0]).unwrap();
        assert_eq!(votes.iter().sum::<usize>(), 37);
        let full = model.predict_full(&[0.0, 1.0, 0.0]).unwrap();
        let p = full.probabilities.unwrap();
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert!((full.confidence - p[full.class]).abs() < 1e-12);
    }

    #[test]
    fn same_seed_reproduces_same_forest() {
        let (features, labels) = two_blob_data(12);
        let a = rf_fit(&features, &labels, &RandomForestConfig::new(5)).unwrap();
        let b = rf_fit(&features, &labels, &RandomForestConfig::new(5)).unwrap();
        assert_eq!(a, b);
        let c = rf_fit(&features, &labels, &RandomForestConfig::new(6)).unwrap();
        assert!(a != c);
    }

    #[test]
    fn serial_and_parallel_training_agree() {
        let (features, labels) = two_blob_data(12);
        let config = RandomForestConfig::new(9);
        let parallel = rf_fit(&features, &labels, &config).unwrap();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let serial = pool.install(|| rf_fit(&features, &labels, &config).unwrap());
        assert_eq!(parallel, serial);
    }

    #[test]
    fn rejects_bad_inputs() {
        let (features, labels) = two_blob_data(4);
        let mut config = RandomForestConfig::new(0);
        config.n_trees = 0;
        assert!(matches!(
            rf_fit(&features, &labels, &config),
            Err(ModelError::InvalidHyperparameter { .. })
        ));
        assert!(matches!(
            rf_fit(&features, &labels[..3], &RandomForestConfig::new(0)),
            Err(ModelError::LengthMismatch { .. })
        ));
        let single = vec![vec![1.0], vec![2.0]];
        assert!(matches!(
            rf_fit(&single, &[0, 0], &RandomForestConfig::new(0)),
            Err(ModelError::SingleClass)
        ));
    }

    #[test]
    fn predict_checks_width() {
        let (features, labels) = two_blob_data(5);
        let model = rf_fit(&features, &labels, &RandomForestConfig::new(1)).unwrap();
        assert!(matches!(
            model.predict(&[1.0, 2.0]),
            Err(ModelError::DimensionMismatch {
                expected: 3,
                got: 2
            })
        ));
    }

    #[test]
    fn vote_tie_breaks_to_lowest_class() {
        let (features, labels) = two_blob_data(8);
        let config = RandomForestConfig {
            n_trees: 2,
            max_depth: Some(1),
            ..RandomForestConfig::new(11)
        };
        let model = rf_fit(&features, &labels, &config).unwrap();
        // Probe a point; whatever the votes, the argmax rule must match
        // a manual scan with lowest-index preference.
        let x = [5.0, -4.0, 2.5];
        let votes = model.predict_votes(&x).unwrap();
        let mut expected = 0;
        for (class, &v) in votes.iter().enumerate() {
            if v > votes[expected] {
                expected = class;
            }
        }
        assert_eq!(model.predict(&x).unwrap(), expected);
    }
}
