//! Evaluation surface: confusion matrices, per-class breakdowns,
//! accuracy / weighted precision / recall / F1, probability RMSE,
//! channel correlation, and histograms.

use crate::data::Dataset;
use crate::error::EvalError;
use serde::{Deserialize, Serialize};

/// K×K confusion counts; rows are true classes, columns predictions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    counts: Vec<Vec<usize>>,
    n: usize,
}

impl ConfusionMatrix {
    /// Tallies predictions. All label indices must be below `n_classes`.
    pub fn from_predictions(
        y_true: &[usize],
        y_pred: &[usize],
        n_classes: usize,
    ) -> Result<Self, EvalError> {
        if y_true.is_empty() || y_true.len() != y_pred.len() {
            return Err(EvalError::LengthMismatch {
                true_len: y_true.len(),
                pred_len: y_pred.len(),
            });
        }
        let mut counts = vec![vec![0usize; n_classes]; n_classes];
        for (&t, &p) in y_true.iter().zip(y_pred) {
            for index in [t, p] {
                if index >= n_classes {
                    return Err(EvalError::ClassOutOfRange { index, n_classes });
                }
            }
            counts[t][p] += 1;
        }
        Ok(ConfusionMatrix {
            counts,
            n: y_true.len(),
        })
    }

    /// Builds directly from counts; used by tests and report loading.
    pub fn from_counts(counts: Vec<Vec<usize>>) -> Result<Self, EvalError> {
        let k = counts.len();
        if k == 0 {
            return Err(EvalError::TooFewRows { n: 0, min: 1 });
        }
        for row in &counts {
            if row.len() != k {
                return Err(EvalError::LengthMismatch {
                    true_len: k,
                    pred_len: row.len(),
                });
            }
        }
        let n = counts.iter().flatten().sum();
        Ok(ConfusionMatrix { counts, n })
    }

    pub fn n_classes(&self) -> usize {
        self.counts.len()
    }

    /// Total evaluated samples.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn counts(&self) -> &[Vec<usize>] {
        &self.counts
    }

    /// Correctly classified samples.
    pub fn trace(&self) -> usize {
        (0..self.n_classes()).map(|k| self.counts[k][k]).sum()
    }

    /// True-class sample count for class `k`.
    pub fn support(&self, k: usize) -> usize {
        self.counts[k].iter().sum()
    }

    /// Samples predicted as class `k`.
    pub fn predicted(&self, k: usize) -> usize {
        self.counts.iter().map(|row| row[k]).sum()
    }

    /// TP/FP/FN/TN counts for one class.
    pub fn breakdown(&self, k: usize) -> ClassBreakdown {
        let tp = self.counts[k][k];
        let fp = self.predicted(k) - tp;
        let fn_count = self.support(k) - tp;
        ClassBreakdown {
            class: k,
            true_pos: tp,
            false_pos: fp,
            false_neg: fn_count,
            true_neg: self.n - tp - fp - fn_count,
        }
    }
}

/// One-vs-rest outcome counts for a single class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassBreakdown {
    pub class: usize,
    #[serde(rename = "tp")]
    pub true_pos: usize,
    #[serde(rename = "fp")]
    pub false_pos: usize,
    #[serde(rename = "fn")]
    pub false_neg: usize,
    #[serde(rename = "tn")]
    pub true_neg: usize,
}

impl ClassBreakdown {
    pub fn total(&self) -> usize {
        self.true_pos + self.false_pos + self.false_neg + self.true_neg
    }
}

/// Per-class metrics alongside the outcome counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassReport {
    #[serde(flatten)]
    pub breakdown: ClassBreakdown,
    pub support: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// The full metrics bundle for one evaluated model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub n: usize,
    pub accuracy: f64,
    pub precision_weighted: f64,
    pub recall_weighted: f64,
    pub f1_weighted: f64,
    pub precision_macro: f64,
    pub recall_macro: f64,
    pub f1_macro: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rmse: Option<f64>,
    pub per_class: Vec<ClassReport>,
    pub confusion: Vec<Vec<usize>>,
}

/// Ratio with the 0-for-0/0 convention.
fn safe_div(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Derives the metrics bundle from a confusion matrix. `rmse` is computed
/// separately (it needs the probability rows) and passed through.
pub fn metrics(cm: &ConfusionMatrix, rmse: Option<f64>) -> MetricsReport {
    let k = cm.n_classes();
    let n = cm.n() as f64;
    let mut per_class = Vec::with_capacity(k);
    let (mut pw, mut rw, mut fw) = (0.0, 0.0, 0.0);
    let (mut pm, mut rm, mut fm) = (0.0, 0.0, 0.0);
    for class in 0..k {
        let b = cm.breakdown(class);
        let support = cm.support(class);
        let precision = safe_div(b.true_pos as f64, (b.true_pos + b.false_pos) as f64);
        let recall = safe_div(b.true_pos as f64, (b.true_pos + b.false_neg) as f64);
        let f1 = safe_div(2.0 * precision * recall, precision + recall);
        pw += precision * support as f64;
        rw += recall * support as f64;
        fw += f1 * support as f64;
        pm += precision;
        rm += recall;
        fm += f1;
        per_class.push(ClassReport {
            breakdown: b,
            support,
            precision,
            recall,
            f1,
        });
    }
    MetricsReport {
        n: cm.n(),
        accuracy: cm.trace() as f64 / n,
        precision_weighted: pw / n,
        recall_weighted: rw / n,
        f1_weighted: fw / n,
        precision_macro: pm / k as f64,
        recall_macro: rm / k as f64,
        f1_macro: fm / k as f64,
        rmse,
        per_class,
        confusion: cm.counts().to_vec(),
    }
}

/// Root-mean-square error between probability rows and one-hot truth:
/// sqrt((1/(N·K)) Σ_i Σ_k (p_ik − 1{y_i = k})²).
///
/// Every row must have the same width K ≥ 1 and sum to 1 within 1e-6.
pub fn rmse_proba(probabilities: &[Vec<f64>], y_true: &[usize]) -> Result<f64, EvalError> {
    if probabilities.is_empty() || probabilities.len() != y_true.len() {
        return Err(EvalError::LengthMismatch {
            true_len: y_true.len(),
            pred_len: probabilities.len(),
        });
    }
    let k = probabilities[0].len();
    if k == 0 {
        return Err(EvalError::MalformedProbabilityRow {
            row: 0,
            message: "zero-width row".into(),
        });
    }
    let mut sum_sq = 0.0;
    for (row, (probs, &truth)) in probabilities.iter().zip(y_true).enumerate() {
        if probs.len() != k {
            return Err(EvalError::MalformedProbabilityRow {
                row,
                message: format!("width {} != {}", probs.len(), k),
            });
        }
        if truth >= k {
            return Err(EvalError::ClassOutOfRange {
                index: truth,
                n_classes: k,
            });
        }
        let total: f64 = probs.iter().sum();
        if !total.is_finite() || (total - 1.0).abs() > 1e-6 {
            return Err(EvalError::MalformedProbabilityRow {
                row,
                message: format!("row sums to {total}, expected 1"),
            });
        }
        for (class, &p) in probs.iter().enumerate() {
            let target = if class == truth { 1.0 } else { 0.0 };
            sum_sq += (p - target) * (p - target);
        }
    }
    Ok((sum_sq / (probabilities.len() * k) as f64).sqrt())
}

/// RMSE of hard predictions treated as one-hot probability rows.
pub fn rmse_hard(y_true: &[usize], y_pred: &[usize], n_classes: usize) -> Result<f64, EvalError> {
    if y_true.is_empty() || y_true.len() != y_pred.len() {
        return Err(EvalError::LengthMismatch {
            true_len: y_true.len(),
            pred_len: y_pred.len(),
        });
    }
    let rows: Vec<Vec<f64>> = y_pred
        .iter()
        .map(|&p| {
            if p >= n_classes {
                return Err(EvalError::ClassOutOfRange {
                    index: p,
                    n_classes,
                });
            }
            let mut row = vec![0.0; n_classes];
            row[p] = 1.0;
            Ok(row)
        })
        .collect::<Result<_, _>>()?;
    rmse_proba(&rows, y_true)
}

/// Pearson correlation between every pair of the nine channels.
///
/// Diagonal is exactly 1; zero-variance channels correlate 0 with
/// everything else; entries are clamped to [−1, 1].
pub fn correlation_matrix(dataset: &Dataset) -> Result<Vec<Vec<f64>>, EvalError> {
    let n = dataset.len();
    if n < 2 {
        return Err(EvalError::TooFewRows { n, min: 2 });
    }
    let columns: Vec<Vec<f64>> = (0..9).map(|c| dataset.channel_column(c)).collect();
    let means: Vec<f64> = columns
        .iter()
        .map(|col| col.iter().sum::<f64>() / n as f64)
        .collect();
    let centered: Vec<Vec<f64>> = columns
        .iter()
        .zip(&means)
        .map(|(col, mean)| col.iter().map(|v| v - mean).collect())
        .collect();
    let norms: Vec<f64> = centered
        .iter()
        .map(|col| col.iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect();
    let mut matrix = vec![vec![0.0; 9]; 9];
    for i in 0..9 {
        matrix[i][i] = 1.0;
        for j in (i + 1)..9 {
            let r = if norms[i] == 0.0 || norms[j] == 0.0 {
                0.0
            } else {
                let dot: f64 = centered[i].iter().zip(&centered[j]).map(|(a, b)| a * b).sum();
                (dot / (norms[i] * norms[j])).clamp(-1.0, 1.0)
            };
            matrix[i][j] = r;
            matrix[j][i] = r;
        }
    }
    Ok(matrix)
}

/// Equal-width histogram over `[min, max]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    /// `counts.len() + 1` boundaries; the last edge equals the maximum.
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

/// Bins values into `n_bins` equal-width bins spanning [min, max]. The
/// maximum falls in the last bin. An all-identical input collapses to a
/// single bin of width zero holding every value.
pub fn histogram(values: &[f64], n_bins: usize) -> Result<Histogram, EvalError> {
    if values.is_empty() || n_bins == 0 {
        return Err(EvalError::EmptyHistogramInput);
    }
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !(min.is_finite() && max.is_finite()) {
        return Err(EvalError::EmptyHistogramInput);
    }
    if min == max {
        return Ok(Histogram {
            edges: vec![min, max],
            counts: vec![values.len()],
        });
    }
    let span = max - min;
    let mut edges = Vec::with_capacity(n_bins + 1);
    for i in 0..n_bins {
        edges.push(min + span * i as f64 / n_bins as f64);
    }
    edges.push(max);
    let mut counts = vec![0usize; n_bins];
    for &v in values {
        let raw = ((v - min) / span * n_bins as f64).floor() as usize;
        counts[raw.min(n_bins - 1)] += 1;
    }
    Ok(Histogram { edges, counts })
}
