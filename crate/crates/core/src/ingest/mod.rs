//! Dataset ingestion: CSV parsing, stream synchronization, and seeded
//! synthetic data generation.

pub mod csv;
pub mod sync;
pub mod synth;

use crate::data::SensorKind;
use crate::error::IngestError;
use serde::{Deserialize, Serialize};

/// Labels attached to a raw stream, if any.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum StreamLabels {
    None,
    /// One activity name per sample, aligned with `samples`.
    PerSample(Vec<String>),
    /// One activity name covering the whole stream.
    PerFile(String),
}

/// One sensor's un-synchronized samples: (timestamp ms, triple) pairs
/// kept in non-decreasing timestamp order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawSensorStream {
    pub kind: SensorKind,
    pub samples: Vec<(i64, [f64; 3])>,
    pub labels: StreamLabels,
}

impl RawSensorStream {
    /// Builds a stream, sorting samples (and any per-sample labels) by
    /// timestamp.
    pub fn new(
        kind: SensorKind,
        samples: Vec<(i64, [f64; 3])>,
        per_sample_labels: Option<Vec<String>>,
    ) -> Result<RawSensorStream, IngestError> {
        if let Some(labels) = &per_sample_labels {
            if labels.len() != samples.len() {
                return Err(IngestError::Layout {
                    message: format!(
                        "{} labels for {} samples",
                        labels.len(),
                        samples.len()
                    ),
                });
            }
        }
        let mut order: Vec<usize> = (0..samples.len()).collect();
        order.sort_by_key(|&i| samples[i].0);
        let sorted_samples = order.iter().map(|&i| samples[i]).collect();
        let labels = match per_sample_labels {
            Some(labels) => {
                StreamLabels::PerSample(order.iter().map(|&i| labels[i].clone()).collect())
            }
            None => StreamLabels::None,
        };
        Ok(RawSensorStream {
            kind,
            samples: sorted_samples,
            labels,
        })
    }

    /// The activity name for one sample, however labels are attached.
    pub fn label_at(&self, index: usize) -> Option<&str> {
        match &self.labels {
            StreamLabels::None => None,
            StreamLabels::PerSample(labels) => labels.get(index).map(String::as_str),
            StreamLabels::PerFile(label) => Some(label),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_sorts_samples_and_labels_together() {
        let stream = RawSensorStream::new(
            SensorKind::Accelerometer,
            vec![(20, [2.0; 3]), (0, [0.0; 3]), (10, [1.0; 3])],
            Some(vec!["c".into(), "a".into(), "b".into()]),
        )
        .unwrap();
        let timestamps: Vec<i64> = stream.samples.iter().map(|s| s.0).collect();
        assert_eq!(timestamps, vec![0, 10, 20]);
        assert_eq!(
            stream.labels,
            StreamLabels::PerSample(vec!["a".into(), "b".into(), "c".into()])
        );
        assert_eq!(stream.label_at(1), Some("b"));
    }

    #[test]
    fn label_count_mismatch_is_rejected() {
        let result = RawSensorStream::new(
            SensorKind::Gyroscope,
            vec![(0, [0.0; 3])],
            Some(vec!["a".into(), "b".into()]),
        );
        assert!(matches!(result, Err(IngestError::Layout { .. })));
    }
}
