//! Classifier families, decision-level voting, and model persistence.

pub mod forest;
pub mod gboost;
pub mod svm;
pub mod tree;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::data::{SensorKind, SyncRecord};
use crate::error::ModelError;
use crate::models::forest::RandomForestModel;
use crate::models::gboost::GradientBoostModel;
use crate::models::svm::LinearSvmModel;

/// Version stamp written into every serialized model document.
pub const MODEL_FORMAT_VERSION: u32 = 1;

/// One classification outcome. `confidence` is family-specific: a vote
/// fraction for forests, a softmax probability for boosting, a raw
/// decision value for the SVM. `probabilities` is `None` for models
/// without probability estimates.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub class: usize,
    pub confidence: f64,
    pub probabilities: Option<Vec<f64>>,
}

/// Checks a feature matrix / label pairing and returns
/// (n_samples, n_features, n_classes).
pub(crate) fn validate_training_input(
    features: &[Vec<f64>],
    labels: &[usize],
) -> Result<(usize, usize, usize), ModelError> {
    if features.len() != labels.len() {
        return Err(ModelError::LengthMismatch {
            features: features.len(),
            labels: labels.len(),
        });
    }
    if features.len() < 2 {
        return Err(ModelError::TooFewSamples {
            n: features.len(),
            min: 2,
        });
    }
    let d = features[0].len();
    if d == 0 {
        return Err(ModelError::InvalidHyperparameter {
            message: "feature rows must hold at least one column".into(),
        });
    }
    for (row, x) in features.iter().enumerate() {
        if x.len() != d {
            return Err(ModelError::RaggedFeatures {
                row,
                got: x.len(),
                expected: d,
            });
        }
        for (column, &v) in x.iter().enumerate() {
            if !v.is_finite() {
                return Err(ModelError::NonFiniteFeature { row, column });
            }
        }
    }
    let n_classes = labels.iter().max().copied().unwrap_or(0) + 1;
    let mut seen = vec![false; n_classes];
    labels.iter().for_each(|&y| seen[y] = true);
    if seen.iter().filter(|&&s| s).count() < 2 {
        return Err(ModelError::SingleClass);
    }
    Ok((features.len(), d, n_classes))
}

/// The three classifier families, in report order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelFamily {
    LinearSvm,
    GradientBoost,
    RandomForest,
}

impl ModelFamily {
    pub const ALL: [ModelFamily; 3] = [
        ModelFamily::LinearSvm,
        ModelFamily::GradientBoost,
        ModelFamily::RandomForest,
    ];

    /// Short command-line name.
    pub fn cli_name(self) -> &'static str {
        match self {
            ModelFamily::LinearSvm => "svm",
            ModelFamily::GradientBoost => "gboost",
            ModelFamily::RandomForest => "rf",
        }
    }

    /// Human-readable name for reports.
    pub fn display_name(self) -> &'static str {
        match self {
            ModelFamily::LinearSvm => "Linear SVM",
            ModelFamily::GradientBoost => "Gradient Boosting",
            ModelFamily::RandomForest => "Random Forest",
        }
    }
}

impl FromStr for ModelFamily {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "svm" => Ok(ModelFamily::LinearSvm),
            "gboost" => Ok(ModelFamily::GradientBoost),
            "rf" => Ok(ModelFamily::RandomForest),
            other => Err(ModelError::InvalidHyperparameter {
                message: format!("unknown model family {other:?} (expected svm, gboost, or rf)"),
            }),
        }
    }
}

impl fmt::Display for ModelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.cli_name())
    }
}

/// A trained classifier of any family, behind one dispatch surface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum BaseModel {
    LinearSvm(LinearSvmModel),
    GradientBoost(GradientBoostModel),
    RandomForest(RandomForestModel),
}

impl BaseModel {
    pub fn family(&self) -> ModelFamily {
        match self {
            BaseModel::LinearSvm(_) => ModelFamily::LinearSvm,
            BaseModel::GradientBoost(_) => ModelFamily::GradientBoost,
            BaseModel::RandomForest(_) => ModelFamily::RandomForest,
        }
    }

    pub fn n_features(&self) -> usize {
        match self {
            BaseModel::LinearSvm(m) => m.n_features(),
            BaseModel::GradientBoost(m) => m.n_features(),
            BaseModel::RandomForest(m) => m.n_features(),
        }
    }

    pub fn n_classes(&self) -> usize {
        match self {
            BaseModel::LinearSvm(m) => m.n_classes(),
            BaseModel::GradientBoost(m) => m.n_classes(),
            BaseModel::RandomForest(m) => m.n_classes(),
        }
    }

    pub fn predict_full(&self, x: &[f64]) -> Result<Prediction, ModelError> {
        match self {
            BaseModel::LinearSvm(m) => m.predict_full(x),
            BaseModel::GradientBoost(m) => m.predict_full(x),
            BaseModel::RandomForest(m) => m.predict_full(x),
        }
    }

    pub fn predict(&self, x: &[f64]) -> Result<usize, ModelError> {
        Ok(self.predict_full(x)?.class)
    }
}

/// Combines three per-sensor votes. A class named by at least two voters
/// wins outright; a three-way disagreement falls to the vote with the
/// highest confidence, and any remaining tie to the lowest class index.
/// Confidences are only consulted (and only required) for the
/// three-way case.
pub fn majority_vote(
    votes: [usize; 3],
    confidences: Option<[f64; 3]>,
) -> Result<usize, ModelError> {
    if votes[0] == votes[1] || votes[0] == votes[2] {
        return Ok(votes[0]);
    }
    if votes[1] == votes[2] {
        return Ok(votes[1]);
    }
    let confidences = confidences.ok_or(ModelError::MissingConfidence)?;
    let mut winner = 0;
    for i in 1..3 {
        let better = confidences[i] > confidences[winner]
            || (confidences[i] == confidences[winner] && votes[i] < votes[winner]);
        if better {
            winner = i;
        }
    }
    Ok(votes[winner])
}

/// One voter in a decision-level ensemble.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensorMember {
    pub sensor: SensorKind,
    pub model: BaseModel,
}

/// Decision-level fusion: one 3-feature model per sensor, combined with
/// `majority_vote`. Members are kept in canonical sensor order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensorVoteEnsemble {
    members: Vec<SensorMember>,
}

impl SensorVoteEnsemble {
    pub fn new(mut members: Vec<SensorMember>) -> Result<Self, ModelError> {
        if members.len() != 3 {
            return Err(ModelError::BadEnsemble {
                message: format!("expected 3 members, got {}", members.len()),
            });
        }
        members.sort_by_key(|m| m.sensor.column_offset());
        for (member, kind) in members.iter().zip(SensorKind::ALL) {
            if member.sensor != kind {
                return Err(ModelError::BadEnsemble {
                    message: format!("missing a model for the {kind}"),
                });
            }
            if member.model.n_features() != 3 {
                return Err(ModelError::BadEnsemble {
                    message: format!(
                        "{kind} model expects {} features, sensor rows have 3",
                        member.model.n_features()
                    ),
                });
            }
        }
        let n_classes = members[0].model.n_classes();
        if members.iter().any(|m| m.model.n_classes() != n_classes) {
            return Err(ModelError::BadEnsemble {
                message: "members disagree on the number of classes".into(),
            });
        }
        Ok(SensorVoteEnsemble { members })
    }

    pub fn members(&self) -> &[SensorMember] {
        &self.members
    }

    pub fn n_classes(&self) -> usize {
        self.members[0].model.n_classes()
    }

    /// Votes on one fused 9-channel row.
    pub fn predict_channels(&self, channels: &[f64]) -> Result<Prediction, ModelError> {
        if channels.len() != 9 {
            return Err(ModelError::DimensionMismatch {
                expected: 9,
                got: channels.len(),
            });
        }
        let mut votes = [0usize; 3];
        let mut confidences = [0.0f64; 3];
        for (slot, member) in self.members.iter().enumerate() {
            let offset = member.sensor.column_offset();
            let p = member.model.predict_full(&channels[offset..offset + 3])?;
            votes[slot] = p.class;
            confidences[slot] = p.confidence;
        }
        let class = majority_vote(votes, Some(confidences))?;
        // Report the strongest confidence among the members that voted
        // for the winning class.
        let confidence = votes
            .iter()
            .zip(confidences)
            .filter(|(&v, _)| v == class)
            .map(|(_, c)| c)
            .fold(f64::NEG_INFINITY, f64::max);
        Ok(Prediction {
            class,
            confidence,
            probabilities: None,
        })
    }

    pub fn predict_record(&self, record: &SyncRecord) -> Result<Prediction, ModelError> {
        self.predict_channels(&record.channels())
    }
}

/// What a saved model was trained on, so evaluation can rebuild the
/// same features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "fusion", rename_all = "snake_case")]
pub enum TrainedView {
    /// Raw channels of the named sensors, in canonical order.
    Sensors { sensors: Vec<SensorKind> },
    /// Per-sensor voting; the model itself carries the three members.
    Decision,
    /// The three filtered columns produced by the state estimator.
    Kalman { q_scale: f64, r_scale: f64 },
}

/// A single trained model of any shape.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelKind {
    Base(BaseModel),
    SensorVote(SensorVoteEnsemble),
}

impl ModelKind {
    pub fn n_classes(&self) -> usize {
        match self {
            ModelKind::Base(m) => m.n_classes(),
            ModelKind::SensorVote(e) => e.n_classes(),
        }
    }
}

/// Serializable envelope binding a model to the view it was trained on
/// and the activity vocabulary it predicts into.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SavedModel {
    pub format_version: u32,
    pub labels: Vec<String>,
    pub view: TrainedView,
    pub model: ModelKind,
}

impl SavedModel {
    pub fn new(labels: Vec<String>, view: TrainedView, model: ModelKind) -> Self {
        SavedModel {
            format_version: MODEL_FORMAT_VERSION,
            labels,
            view,
            model,
        }
    }

    pub fn to_json(&self) -> Result<String, ModelError> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<SavedModel, ModelError> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        let found = value
            .get("format_version")
            .and_then(serde_json::Value::as_u64)
            .unwrap_or(0) as u32;
        if found != MODEL_FORMAT_VERSION {
            return Err(ModelError::UnsupportedVersion {
                found,
                expected: MODEL_FORMAT_VERSION,
            });
        }
        Ok(serde_json::from_value(value)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::forest::{rf_fit, RandomForestConfig};
    use crate::models::gboost::{gb_fit, GradientBoostConfig};
    use crate::models::svm::{svm_fit, LinearSvmConfig};

    fn sensor_rows() -> (Vec<Vec<f64>>, Vec<usize>) {
        // 9-channel rows; each sensor triple separates the classes.
        let mut features = Vec::new();
        let mut labels = Vec::new();
        for i in 0..20 {
            let w = (i % 4) as f64 * 0.05;
            features.push(vec![
                1.0 + w,
                0.0,
                0.0,
                2.0 - w,
                0.0,
                0.0,
                3.0 + w,
                0.0,
                0.0,
            ]);
            labels.push(0);
            features.push(vec![
                -1.0 - w,
                0.5,
                0.0,
                -2.0 + w,
                0.5,
                0.0,
                -3.0 - w,
                0.5,
                0.0,
            ]);
            labels.push(1);
        }
        (features, labels)
    }

    fn triple(features: &[Vec<f64>], offset: usize) -> Vec<Vec<f64>> {
        features.iter().map(|x| x[offset..offset + 3].to_vec()).collect()
    }

    #[test]
    fn vote_agreement_wins_without_confidence() {
        assert_eq!(majority_vote([2, 2, 2], None).unwrap(), 2);
        assert_eq!(majority_vote([1, 3, 1], None).unwrap(), 1);
        assert_eq!(majority_vote([0, 2, 2], None).unwrap(), 2);
    }

    #[test]
    fn three_way_tie_uses_confidence_then_lowest_index() {
        assert_eq!(
            majority_vote([0, 1, 2], Some([0.1, 0.9, 0.2])).unwrap(),
            1
        );
        // Equal confidences: lowest class index among the tied maxima.
        assert_eq!(
            majority_vote([2, 0, 1], Some([0.5, 0.5, 0.5])).unwrap(),
            0
        );
        assert!(matches!(
            majority_vote([0, 1, 2], None),
            Err(ModelError::MissingConfidence)
        ));
    }

    #[test]
    fn family_parses_cli_names() {
        assert_eq!("svm".parse::<ModelFamily>().unwrap(), ModelFamily::LinearSvm);
        assert_eq!(
            "gboost".parse::<ModelFamily>().unwrap(),
            ModelFamily::GradientBoost
        );
        assert_eq!("RF".parse::<ModelFamily>().unwrap(), ModelFamily::RandomForest);
        assert!("forest".parse::<ModelFamily>().is_err());
        assert_eq!(ModelFamily::GradientBoost.to_string(), "gboost");
    }

    #[test]
    fn validation_rejects_bad_matrices() {
        assert!(matches!(
            validate_training_input(&[vec![1.0]], &[0]),
            Err(ModelError::TooFewSamples { .. })
        ));
        assert!(matches!(
            validate_training_input(&[vec![1.0], vec![1.0, 2.0]], &[0, 1]),
            Err(ModelError::RaggedFeatures { row: 1, .. })
        ));
        assert!(matches!(
            validate_training_input(&[vec![1.0], vec![f64::NAN]], &[0, 1]),
            Err(ModelError::NonFiniteFeature { row: 1, column: 0 })
        ));
        assert!(matches!(
            validate_training_input(&[vec![], vec![]], &[0, 1]),
            Err(ModelError::InvalidHyperparameter { .. })
        ));
        let (n, d, k) =
            validate_training_input(&[vec![1.0], vec![2.0], vec![3.0]], &[0, 2, 0]).unwrap();
        assert_eq!((n, d, k), (3, 1, 3));
    }

    #[test]
    fn ensemble_requires_one_model_per_sensor() {
        let (features, labels) = sensor_rows();
        let model = |offset: usize| {
            BaseModel::RandomForest(
                rf_fit(
                    &triple(&features, offset),
                    &labels,
                    &RandomForestConfig {
                        n_trees: 5,
                        ..RandomForestConfig::new(offset as u64)
                    },
                )
                .unwrap(),
            )
        };
        let member = |sensor: SensorKind| SensorMember {
            sensor,
            model: model(sensor.column_offset()),
        };
        let good = SensorVoteEnsemble::new(vec![
            member(SensorKind::Magnetometer),
            member(SensorKind::Accelerometer),
            member(SensorKind::Gyroscope),
        ])
        .unwrap();
        // Members are reordered canonically regardless of input order.
        assert_eq!(good.members()[0].sensor, SensorKind::Accelerometer);
        assert_eq!(good.members()[2].sensor, SensorKind::Magnetometer);

        assert!(matches!(
            SensorVoteEnsemble::new(vec![
                member(SensorKind::Accelerometer),
                member(SensorKind::Accelerometer),
                member(SensorKind::Gyroscope),
            ]),
            Err(ModelError::BadEnsemble { .. })
        ));
        assert!(matches!(
            SensorVoteEnsemble::new(vec![member(SensorKind::Accelerometer)]),
            Err(ModelError::BadEnsemble { .. })
        ));
    }

    #[test]
    fn ensemble_votes_on_fused_rows() {
        let (features, labels) = sensor_rows();
        let members: Vec<SensorMember> = SensorKind::ALL
            .iter()
            .map(|&sensor| SensorMember {
                sensor,
                model: BaseModel::GradientBoost(
                    gb_fit(
                        &triple(&features, sensor.column_offset()),
                        &labels,
                        &GradientBoostConfig {
                            n_stages: 20,
                            ..GradientBoostConfig::new(7)
                        },
                    )
                    .unwrap(),
                ),
            })
            .collect();
        let ensemble = SensorVoteEnsemble::new(members).unwrap();
        for (x, &y) in features.iter().zip(&labels) {
            assert_eq!(ensemble.predict_channels(x).unwrap().class, y);
        }
        assert!(ensemble.predict_channels(&[0.0; 4]).is_err());
    }

    #[test]
    fn saved_model_round_trips_all_families() {
        let (features, labels) = sensor_rows();
        let accel = triple(&features, 0);
        let models = [
            BaseModel::LinearSvm(
                svm_fit(
                    &accel,
                    &labels,
                    &LinearSvmConfig {
                        epochs: 10,
                        ..LinearSvmConfig::new(1)
                    },
                )
                .unwrap(),
            ),
            BaseModel::GradientBoost(
                gb_fit(
                    &accel,
                    &labels,
                    &GradientBoostConfig {
                        n_stages: 5,
                        ..GradientBoostConfig::new(1)
                    },
                )
                .unwrap(),
            ),
            BaseModel::RandomForest(
                rf_fit(
                    &accel,
                    &labels,
                    &RandomForestConfig {
                        n_trees: 5,
                        ..RandomForestConfig::new(1)
                    },
                )
                .unwrap(),
            ),
        ];
        for model in models {
            let saved = SavedModel::new(
                vec!["walking".into(), "sitting".into()],
                TrainedView::Sensors {
                    sensors: vec![SensorKind::Accelerometer],
                },
                ModelKind::Base(model),
            );
            let json = saved.to_json().unwrap();
            let loaded = SavedModel::from_json(&json).unwrap();
            assert_eq!(loaded, saved);
            // The reloaded model predicts identically.
            if let (ModelKind::Base(a), ModelKind::Base(b)) = (&saved.model, &loaded.model) {
                for x in accel.iter().take(5) {
                    assert_eq!(a.predict(x).unwrap(), b.predict(x).unwrap());
                }
            }
        }
    }

    #[test]
    fn saved_model_rejects_other_versions() {
        let (features, labels) = sensor_rows();
        let saved = SavedModel::new(
            vec!["a".into(), "b".into()],
            TrainedView::Kalman {
                q_scale: 0.1,
                r_scale: 0.5,
            },
            ModelKind::Base(BaseModel::RandomForest(
                rf_fit(
                    &triple(&features, 0),
                    &labels,
                    &RandomForestConfig {
                        n_trees: 3,
                        ..RandomForestConfig::new(0)
                    },
                )
                .unwrap(),
            )),
        );
        let json = saved.to_json().unwrap().replace(
            "\"format_version\": 1",
            "\"format_version\": 9",
        );
        assert!(matches!(
            SavedModel::from_json(&json),
            Err(ModelError::UnsupportedVersion {
                found: 9,
                expected: 1
            })
        ));
    }
}
