//! Binary decision trees shared by the forest (classification leaves,
//! Gini splits) and the boosting trainer (real-valued leaves,
//! squared-error splits).

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// One tree node; `L` is the leaf payload (class index or score).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum TreeNode<L> {
    Leaf {
        value: L,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: Box<TreeNode<L>>,
        right: Box<TreeNode<L>>,
    },
}

/// A fitted tree: samples with `x[feature] <= threshold` descend left.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree<L> {
    root: TreeNode<L>,
    n_features: usize,
}

impl<L: Copy> DecisionTree<L> {
    pub fn apply(&self, x: &[f64]) -> L {
        debug_assert_eq!(x.len(), self.n_features);
        let mut node = &self.root;
        loop {
            match node {
                TreeNode::Leaf { value } => return *value,
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    node = if x[*feature] <= *threshold { left } else { right };
                }
            }
        }
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn depth(&self) -> usize {
        fn walk<L>(node: &TreeNode<L>) -> usize {
            match node {
                TreeNode::Leaf { .. } => 0,
                TreeNode::Split { left, right, .. } => 1 + walk(left).max(walk(right)),
            }
        }
        walk(&self.root)
    }

    pub fn n_leaves(&self) -> usize {
        fn walk<L>(node: &TreeNode<L>) -> usize {
            match node {
                TreeNode::Leaf { .. } => 1,
                TreeNode::Split { left, right, .. } => walk(left) + walk(right),
            }
        }
        walk(&self.root)
    }
}

/// Split search shared by both growers: a candidate boundary between
/// adjacent distinct values, scored by the criterion's summed child cost.
struct BestSplit {
    feature: usize,
    threshold: f64,
    cost: f64,
}

/// The threshold between two adjacent distinct values. Midpoint rounding
/// can land exactly on the upper value; nudge back to the lower one so
/// the `<=` test always separates the two.
fn boundary(lower: f64, upper: f64) -> f64 {
    let mid = 0.5 * (lower + upper);
    if mid < upper {
        mid
    } else {
        lower
    }
}

pub(crate) struct ClassificationGrow<'a> {
    pub features: &'a [Vec<f64>],
    pub labels: &'a [usize],
    pub n_classes: usize,
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
    /// Features examined per split; `None` means all.
    pub feature_subsample: Option<usize>,
}

impl<'a> ClassificationGrow<'a> {
    /// Grows a Gini-impurity tree over `indices` (a bootstrap sample;
    /// repeats allowed). `rng` drives per-node feature subsampling.
    pub fn grow(&self, indices: &[usize], rng: &mut ChaCha8Rng) -> DecisionTree<usize> {
        let root = self.grow_node(indices, 0, rng);
        DecisionTree {
            root,
            n_features: self.features.first().map_or(0, Vec::len),
        }
    }

    fn majority_leaf(&self, counts: &[usize]) -> TreeNode<usize> {
        let mut best = 0;
        for (class, &count) in counts.iter().enumerate() {
            if count > counts[best] {
                best = class;
            }
        }
        TreeNode::Leaf { value: best }
    }

    fn grow_node(
        &self,
        indices: &[usize],
        depth: usize,
        rng: &mut ChaCha8Rng,
    ) -> TreeNode<usize> {
        let mut counts = vec![0usize; self.n_classes];
        for &i in indices {
            counts[self.labels[i]] += 1;
        }
        let is_pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
        let depth_exhausted = self.max_depth.is_some_and(|limit| depth >= limit);
        if is_pure || depth_exhausted || indices.len() < 2 * self.min_samples_leaf.max(1) {
            return self.majority_leaf(&counts);
        }
        let d = self.features[0].len();
        let candidates = sample_features(d, self.feature_subsample, rng);
        let Some(split) = self.best_split(indices, &counts, &candidates) else {
            return self.majority_leaf(&counts);
        };
        let (left, right) = partition(self.features, indices, split.feature, split.threshold);
        TreeNode::Split {
            feature: split.feature,
            threshold: split.threshold,
            left: Box::new(self.grow_node(&left, depth + 1, rng)),
            right: Box::new(self.grow_node(&right, depth + 1, rng)),
        }
    }

    fn best_split(
        &self,
        indices: &[usize],
        counts: &[usize],
        candidates: &[usize],
    ) -> Option<BestSplit> {
        let n = indices.len();
        let parent_cost = gini_cost(counts, n);
        let mut best: Option<BestSplit> = None;
        let mut pairs: Vec<(f64, usize)> = Vec::with_capacity(n);
        let mut left_counts = vec![0usize; self.n_classes];
        for &feature in candidates {
            pairs.clear();
            pairs.extend(
                indices
                    .iter()
                    .map(|&i| (self.features[i][feature], self.labels[i])),
            );
            pairs.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
            left_counts.iter_mut().for_each(|c| *c = 0);
            let mut left_sq = 0.0f64;
            let mut right_counts = counts.to_vec();
            let mut right_sq: f64 = counts.iter().map(|&c| (c * c) as f64).sum();
            for position in 1..n {
                let (value, label) = pairs[position - 1];
                // Move one sample left, maintaining Σc² incrementally.
                left_sq += 2.0 * left_counts[label] as f64 + 1.0;
                left_counts[label] += 1;
                right_sq -= 2.0 * right_counts[label] as f64 - 1.0;
                right_counts[label] -= 1;
                if pairs[position].0 == value {
                    continue;
                }
                let n_left = position;
                let n_right = n - position;
                if n_left < self.min_samples_leaf || n_right < self.min_samples_leaf {
                    continue;
                }
                // Weighted Gini cost: Σ_child n_child·(1 − Σ(c/n_child)²)
                // = n − Σ_child (Σc²)/n_child.
                let cost =
                    n as f64 - left_sq / n_left as f64 - right_sq / n_right as f64;
                if best.as_ref().is_none_or(|b| cost < b.cost) {
                    best = Some(BestSplit {
                        feature,
                        threshold: boundary(value, pairs[position].0),
                        cost,
                    });
                }
            }
        }
        // Splitting must strictly reduce impurity.
        best.filter(|b| b.cost < parent_cost - 1e-12)
    }
}

fn gini_cost(counts: &[usize], n: usize) -> f64 {
    let sum_sq: f64 = counts.iter().map(|&c| (c * c) as f64).sum();
    n as f64 - sum_sq / n as f64
}

pub(crate) struct RegressionGrow<'a> {
    pub features: &'a [Vec<f64>],
    pub targets: &'a [f64],
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
}

impl<'a> RegressionGrow<'a> {
    /// Grows a squared-error tree with mean-valued leaves over all
    /// features (no subsampling; fully deterministic).
    pub fn grow(&self, indices: &[usize]) -> DecisionTree<f64> {
        let root = self.grow_node(indices, 0);
        DecisionTree {
            root,
            n_features: self.features.first().map_or(0, Vec::len),
        }
    }

    fn mean_leaf(&self, indices: &[usize]) -> TreeNode<f64> {
        let sum: f64 = indices.iter().map(|&i| self.targets[i]).sum();
        TreeNode::Leaf {
            value: sum / indices.len() as f64,
        }
    }

    fn grow_node(&self, indices: &[usize], depth: usize) -> TreeNode<f64> {
        let depth_exhausted = self.max_depth.is_some_and(|limit| depth >= limit);
        if depth_exhausted || indices.len() < 2 * self.min_samples_leaf.max(1) {
            return self.mean_leaf(indices);
        }
        let Some(split) = self.best_split(indices) else {
            return self.mean_leaf(indices);
        };
        let (left, right) = partition(self.features, indices, split.feature, split.threshold);
        TreeNode::Split {
            feature: split.feature,
            threshold: split.threshold,
            left: Box::new(self.grow_node(&left, depth + 1)),
            right: Box::new(self.grow_node(&right, depth + 1)),
        }
    }

    fn best_split(&self, indices: &[usize]) -> Option<BestSplit> {
        let n = indices.len();
        let total: f64 = indices.iter().map(|&i| self.targets[i]).sum();
        let total_sq: f64 = indices.iter().map(|&i| self.targets[i].powi(2)).sum();
        let parent_cost = total_sq - total * total / n as f64;
        let mut best: Option<BestSplit> = None;
        let d = self.features[0].len();
        let mut pairs: Vec<(f64, f64)> = Vec::with_capacity(n);
        for feature in 0..d {
            pairs.clear();
            pairs.extend(
                indices
                    .iter()
                    .map(|&i| (self.features[i][feature], self.targets[i])),
            );
            pairs.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
            let mut left_sum = 0.0;
            let mut left_sq = 0.0;
            for position in 1..n {
                let (value, target) = pairs[position - 1];
                left_sum += target;
                left_sq += target * target;
                if pairs[position].0 == value {
                    continue;
                }
                let n_left = position;
                let n_right = n - position;
                if n_left < self.min_samples_leaf || n_right < self.min_samples_leaf {
                    continue;
                }
                let right_sum = total - left_sum;
                let right_sq = total_sq - left_sq;
                // Summed child SSE: Σ(y²) − (Σy)²/n per child.
                let cost = (left_sq - left_sum * left_sum / n_left as f64)
                    + (right_sq - right_sum * right_sum / n_right as f64);
                if best.as_ref().is_none_or(|b| cost < b.cost) {
                    best = Some(BestSplit {
                        feature,
                        threshold: boundary(value, pairs[position].0),
                        cost,
                    });
                }
            }
        }
        best.filter(|b| b.cost < parent_cost - 1e-12)
    }
}

/// Draws `k` distinct feature indices (all of them when `k` is `None` or
/// covers every feature), in draw order.
fn sample_features(d: usize, k: Option<usize>, rng: &mut ChaCha8Rng) -> Vec<usize> {
    match k {
        Some(k) if k < d => {
            let mut pool: Vec<usize> = (0..d).collect();
            for i in 0..k {
                let j = rng.gen_range(i..d);
                pool.swap(i, j);
            }
            pool.truncate(k);
            pool
        }
        _ => (0..d).collect(),
    }
}

fn partition(
    features: &[Vec<f64>],
    indices: &[usize],
    feature: usize,
    threshold: f64,
) -> (Vec<usize>, Vec<usize>) {
    let mut left = Vec::new();
    let mut right = Vec::new();
    for &i in indices {
        if features[i][feature] <= threshold {
            left.push(i);
        } else {
            right.push(i);
        }
    }
    (left, right)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded_rng;

    fn grow_classifier(
        features: &[Vec<f64>],
        labels: &[usize],
        n_classes: usize,
        max_depth: Option<usize>,
    ) -> DecisionTree<usize> {
        let grower = ClassificationGrow {
            features,
            labels,
            n_classes,
            max_depth,
            min_samples_leaf: 1,
            feature_subsample: None,
        };
        let indices: Vec<usize> = (0..labels.len()).collect();
        grower.grow(&indices, &mut seeded_rng(0))
    }

    #[test]
    fn separable_single_feature_needs_one_split() {
        let features: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64]).collect();
        let labels: Vec<usize> = (0..10).map(|i| usize::from(i >= 5)).collect();
        let tree = grow_classifier(&features, &labels, 2, None);
        assert_eq!(tree.depth(), 1);
        assert_eq!(tree.n_leaves(), 2);
        for (x, label) in features.iter().zip(&labels) {
            assert_eq!(tree.apply(x), *label);
        }
        assert_eq!(tree.apply(&[4.2]), 0);
        assert_eq!(tree.apply(&[4.6]), 1);
    }

    #[test]
    fn pure_node_stops_immediately() {
        let features = vec![vec![1.0], vec![2.0], vec![3.0]];
        let tree = grow_classifier(&features, &[1, 1, 1], 2, None);
        assert_eq!(tree.depth(), 0);
        assert_eq!(tree.apply(&[99.0]), 1);
    }

    #[test]
    fn depth_limit_caps_the_tree() {
        // Three segments along one axis need two levels of splits.
        let features: Vec<Vec<f64>> = (0..6).map(|i| vec![i as f64]).collect();
        let labels = vec![0, 0, 1, 1, 0, 0];
        let capped = grow_classifier(&features, &labels, 2, Some(1));
        assert!(capped.depth() <= 1);
        let full = grow_classifier(&features, &labels, 2, None);
        assert_eq!(full.depth(), 2);
        for (x, label) in features.iter().zip(&labels) {
            assert_eq!(full.apply(x), *label);
        }
    }

    #[test]
    fn zero_gain_split_is_refused() {
        // Every boundary leaves both children at 50/50, so the weighted
        // impurity never strictly improves and the node stays a leaf.
        let features = vec![
            vec![0.0, 0.0],
            vec![0.0, 1.0],
            vec![1.0, 0.0],
            vec![1.0, 1.0],
        ];
        let labels = vec![0, 1, 1, 0];
        let tree = grow_classifier(&features, &labels, 2, None);
        assert_eq!(tree.depth(), 0);
    }

    #[test]
    fn identical_features_cannot_split() {
        let features = vec![vec![5.0, 5.0]; 4];
        let tree = grow_classifier(&features, &[0, 1, 0, 1], 2, None);
        assert_eq!(tree.depth(), 0);
        // Tie at 2 vs 2 breaks to the lowest class.
        assert_eq!(tree.apply(&[5.0, 5.0]), 0);
    }

    #[test]
    fn min_samples_leaf_blocks_narrow_splits() {
        // Alternating labels: the outer boundaries are blocked by the
        // leaf-size floor and the middle one has zero gain.
        let features: Vec<Vec<f64>> = (0..4).map(|i| vec![i as f64]).collect();
        let labels = vec![0, 1, 0, 1];
        let grower = ClassificationGrow {
            features: &features,
            labels: &labels,
            n_classes: 2,
            max_depth: None,
            min_samples_leaf: 2,
            feature_subsample: None,
        };
        let tree = grower.grow(&[0, 1, 2, 3], &mut seeded_rng(0));
        assert_eq!(tree.depth(), 0);
        assert_eq!(tree.apply(&[0.0]), 0);
        // With the floor relaxed the same data does split.
        let loose = ClassificationGrow {
            min_samples_leaf: 1,
            ..grower
        };
        assert!(loose.grow(&[0, 1, 2, 3], &mut seeded_rng(0)).depth() > 0);
    }

    #[test]
    fn regression_tree_fits_step_function() {
        let features: Vec<Vec<f64>> = (0..8).map(|i| vec![i as f64]).collect();
        let targets: Vec<f64> = (0..8).map(|i| if i < 4 { -1.0 } else { 3.0 }).collect();
        let grower = RegressionGrow {
            features: &features,
            targets: &targets,
            max_depth: Some(3),
            min_samples_leaf: 1,
        };
        let tree = grower.grow(&(0..8).collect::<Vec<_>>());
        assert!((tree.apply(&[0.0]) + 1.0).abs() < 1e-12);
        assert!((tree.apply(&[7.0]) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn regression_tree_leaf_is_the_mean() {
        let features = vec![vec![1.0]; 3];
        let targets = vec![1.0, 2.0, 6.0];
        let grower = RegressionGrow {
            features: &features,
            targets: &targets,
            max_depth: Some(3),
            min_samples_leaf: 1,
        };
        let tree = grower.grow(&[0, 1, 2]);
        assert_eq!(tree.depth(), 0);
        assert!((tree.apply(&[1.0]) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn feature_sampling_draws_distinct_indices() {
        let mut rng = seeded_rng(3);
        for _ in 0..50 {
            let sample = sample_features(9, Some(3), &mut rng);
            assert_eq!(sample.len(), 3);
            let mut sorted = sample.clone();
            sorted.sort_unstable();
            sorted.dedup();
            assert_eq!(sorted.len(), 3);
        }
        assert_eq!(sample_features(4, None, &mut rng), vec![0, 1, 2, 3]);
        assert_eq!(sample_features(4, Some(9), &mut rng), vec![0, 1, 2, 3]);
    }

    #[test]
    fn boundary_never_equals_the_upper_value() {
        let lower = 1.0f64;
        let upper = f64::from_bits(lower.to_bits() + 1);
        let b = boundary(lower, upper);
        assert!(b < upper && b >= lower);
        assert_eq!(boundary(0.0, 1.0), 0.5);
    }

    #[test]
    fn bootstrap_duplicates_are_tolerated() {
        let features: Vec<Vec<f64>> = (0..6).map(|i| vec![i as f64]).collect();
        let labels = vec![0, 0, 0, 1, 1, 1];
        let grower = ClassificationGrow {
            features: &features,
            labels: &labels,
            n_classes: 2,
            max_depth: None,
            min_samples_leaf: 1,
            feature_subsample: None,
        };
        let tree = grower.grow(&[0, 0, 0, 5, 5, 5, 2, 3], &mut seeded_rng(1));
        assert_eq!(tree.apply(&[0.0]), 0);
        assert_eq!(tree.apply(&[5.0]), 1);
    }
}
