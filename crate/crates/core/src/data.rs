//! Core domain types: sensors, labels, synchronized records, datasets,
//! and the seeded train/test split.

use crate::error::DataError;
use crate::rng::seeded_rng;
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

/// The three sensor sources of a synchronized record.
///
/// Each sensor owns a fixed contiguous column triple in a fused row:
/// accelerometer 0–2, gyroscope 3–5, magnetometer 6–8.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SensorKind {
    Accelerometer,
    Gyroscope,
    Magnetometer,
}

impl SensorKind {
    /// All sensors in canonical column order.
    pub const ALL: [SensorKind; 3] = [
        SensorKind::Accelerometer,
        SensorKind::Gyroscope,
        SensorKind::Magnetometer,
    ];

    /// First fused-row column owned by this sensor.
    pub fn column_offset(self) -> usize {
        match self {
            SensorKind::Accelerometer => 0,
            SensorKind::Gyroscope => 3,
            SensorKind::Magnetometer => 6,
        }
    }

    /// Lower-case display name.
    pub fn name(self) -> &'static str {
        match self {
            SensorKind::Accelerometer => "accelerometer",
            SensorKind::Gyroscope => "gyroscope",
            SensorKind::Magnetometer => "magnetometer",
        }
    }

    /// Parses a sensor name; accepts the full name or a short alias.
    pub fn parse(name: &str) -> Option<SensorKind> {
        match name.trim().to_ascii_lowercase().as_str() {
            "accelerometer" | "accel" | "acceleration" => Some(SensorKind::Accelerometer),
            "gyroscope" | "gyro" | "angular_velocity" => Some(SensorKind::Gyroscope),
            "magnetometer" | "mag" | "magnetic_field" => Some(SensorKind::Magnetometer),
            _ => None,
        }
    }
}

impl std::fmt::Display for SensorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Timestamp column header in the canonical CSV layout.
pub const TIMESTAMP_COLUMN: &str = "Timestamp";

/// Label column header in the canonical CSV layout.
pub const LABEL_COLUMN: &str = "label";

/// The nine channel headers in canonical column order.
pub const CHANNEL_COLUMNS: [&str; 9] = [
    "Acceleration X (g)",
    "Acceleration Y (g)",
    "Acceleration Z (g)",
    "Angular velocity X (\u{b0}/s)",
    "Angular velocity Y (\u{b0}/s)",
    "Angular velocity Z (\u{b0}/s)",
    "Magnetic field X (Bx)",
    "Magnetic field Y (By)",
    "Magnetic field Z (Bz)",
];

/// File-name friendly channel identifiers, same order as [`CHANNEL_COLUMNS`].
pub const CHANNEL_SLUGS: [&str; 9] = [
    "acceleration_x",
    "acceleration_y",
    "acceleration_z",
    "angular_velocity_x",
    "angular_velocity_y",
    "angular_velocity_z",
    "magnetic_field_x",
    "magnetic_field_y",
    "magnetic_field_z",
];

/// Activity names with a fixed encoding: walking=0, working=1, sitting=2,
/// lying=3. Any other name is appended in first-appearance order.
pub const PRIMARY_ACTIVITIES: [&str; 4] = ["walking", "working", "sitting", "lying"];

/// One entry of a dataset's label vocabulary.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActivityLabel {
    pub name: String,
    pub index: usize,
}

/// One timestamp-aligned row: nine channel values plus an encoded label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyncRecord {
    /// Milliseconds since the Unix epoch.
    pub timestamp_ms: i64,
    pub accel: [f64; 3],
    pub gyro: [f64; 3],
    pub mag: [f64; 3],
    /// Index into the owning dataset's vocabulary.
    pub label: usize,
}

impl SyncRecord {
    /// The three channel values of one sensor.
    pub fn sensor(&self, kind: SensorKind) -> [f64; 3] {
        match kind {
            SensorKind::Accelerometer => self.accel,
            SensorKind::Gyroscope => self.gyro,
            SensorKind::Magnetometer => self.mag,
        }
    }

    /// All nine channels in canonical column order.
    pub fn channels(&self) -> [f64; 9] {
        [
            self.accel[0],
            self.accel[1],
            self.accel[2],
            self.gyro[0],
            self.gyro[1],
            self.gyro[2],
            self.mag[0],
            self.mag[1],
            self.mag[2],
        ]
    }

    /// One channel by canonical column index (0–8).
    pub fn channel(&self, index: usize) -> f64 {
        assert!(index < 9, "channel index out of range");
        let triple = match index / 3 {
            0 => &self.accel,
            1 => &self.gyro,
            _ => &self.mag,
        };
        triple[index % 3]
    }
}

/// An immutable, timestamp-sorted table of synchronized records plus the
/// label vocabulary they index into.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    rows: Vec<SyncRecord>,
    vocabulary: Vec<ActivityLabel>,
}

impl Dataset {
    /// Builds a dataset, sorting rows by timestamp and validating that
    /// every channel is finite, every label index is in range, and the
    /// vocabulary is dense (entry `i` has index `i`) with unique names.
    pub fn new(
        mut rows: Vec<SyncRecord>,
        vocabulary: Vec<ActivityLabel>,
    ) -> Result<Self, DataError> {
        for (position, entry) in vocabulary.iter().enumerate() {
            if entry.index != position {
                return Err(DataError::VocabularyNotDense {
                    position,
                    index: entry.index,
                });
            }
            if entry.name.is_empty() {
                return Err(DataError::EmptyLabelName { row: position });
            }
            if vocabulary[..position].iter().any(|e| e.name == entry.name) {
                return Err(DataError::DuplicateLabelName {
                    name: entry.name.clone(),
                });
            }
        }
        for (row, record) in rows.iter().enumerate() {
            for channel in 0..9 {
                if !record.channel(channel).is_finite() {
                    return Err(DataError::NonFiniteChannel { row, channel });
                }
            }
            if record.label >= vocabulary.len() {
                return Err(DataError::LabelOutOfRange {
                    row,
                    index: record.label,
                    n_classes: vocabulary.len(),
                });
            }
        }
        rows.sort_by_key(|r| r.timestamp_ms);
        Ok(Dataset { rows, vocabulary })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> &[SyncRecord] {
        &self.rows
    }

    pub fn vocabulary(&self) -> &[ActivityLabel] {
        &self.vocabulary
    }

    /// Number of classes K.
    pub fn n_classes(&self) -> usize {
        self.vocabulary.len()
    }

    /// Name of a label index; panics if out of range (indices are
    /// validated at construction).
    pub fn label_name(&self, index: usize) -> &str {
        &self.vocabulary[index].name
    }

    /// All label names in index order.
    pub fn label_names(&self) -> Vec<String> {
        self.vocabulary.iter().map(|l| l.name.clone()).collect()
    }

    /// Per-row label indices.
    pub fn label_indices(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.label).collect()
    }

    /// One channel as a column vector, by canonical column index.
    pub fn channel_column(&self, index: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r.channel(index)).collect()
    }
}

/// How raw activity names map to dense indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelEncoding {
    /// Fixed walking/working/sitting/lying block first (when any of those
    /// names is present), then unknown names by first appearance.
    PrimaryProtocol,
    /// Pure first-appearance order.
    FirstAppearance,
}

/// Encodes raw activity names using the primary protocol.
pub fn encode_labels(raw_names: &[&str]) -> Result<(Vec<ActivityLabel>, Vec<usize>), DataError> {
    encode_labels_with(raw_names, LabelEncoding::PrimaryProtocol)
}

/// Encodes raw activity names into a dense vocabulary plus per-row indices.
///
/// Under [`LabelEncoding::PrimaryProtocol`], the presence of any of the
/// fixed activity names pins the full walking=0, working=1, sitting=2,
/// lying=3 block so those indices are stable across files; names outside
/// the block follow in first-appearance order. Without any fixed name the
/// vocabulary is first-appearance order, as it always is under
/// [`LabelEncoding::FirstAppearance`].
pub fn encode_labels_with(
    raw_names: &[&str],
    encoding: LabelEncoding,
) -> Result<(Vec<ActivityLabel>, Vec<usize>), DataError> {
    for (row, name) in raw_names.iter().enumerate() {
        if name.is_empty() {
            return Err(DataError::EmptyLabelName { row });
        }
    }
    let use_fixed_block = encoding == LabelEncoding::PrimaryProtocol
        && raw_names
            .iter()
            .any(|n| PRIMARY_ACTIVITIES.contains(n));
    let mut names: Vec<String> = if use_fixed_block {
        PRIMARY_ACTIVITIES.iter().map(|s| s.to_string()).collect()
    } else {
        Vec::new()
    };
    let mut indices = Vec::with_capacity(raw_names.len());
    for name in raw_names {
        let index = match names.iter().position(|n| n == name) {
            Some(i) => i,
            None => {
                names.push(name.to_string());
                names.len() - 1
            }
        };
        indices.push(index);
    }
    let vocabulary = names
        .into_iter()
        .enumerate()
        .map(|(index, name)| ActivityLabel { name, index })
        .collect();
    Ok((vocabulary, indices))
}

/// A seeded, disjoint partition of row indices into train and test sets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainTestSplit {
    pub train_indices: Vec<usize>,
    pub test_indices: Vec<usize>,
    pub ratio: f64,
    pub seed: u64,
}

/// Uniformly shuffles row indices with a seeded generator and splits them
/// so that `|train| = floor(N × ratio)`. Deterministic per seed.
pub fn train_test_split(
    dataset: &Dataset,
    ratio: f64,
    seed: u64,
) -> Result<TrainTestSplit, DataError> {
    split_indices(dataset.len(), ratio, seed)
}

/// [`train_test_split`] over a bare row count.
pub fn split_indices(n: usize, ratio: f64, seed: u64) -> Result<TrainTestSplit, DataError> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(DataError::InvalidSplitRatio { ratio });
    }
    if n < 2 {
        return Err(DataError::TooFewRows { n, min: 2 });
    }
    let mut indices: Vec<usize> = (0..n).collect();
    let mut rng = seeded_rng(seed);
    indices.shuffle(&mut rng);
    let n_train = ((n as f64) * ratio).floor() as usize;
    let test_indices = indices.split_off(n_train);
    Ok(TrainTestSplit {
        train_indices: indices,
        test_indices,
        ratio,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn record(ts: i64, value: f64, label: usize) -> SyncRecord {
        SyncRecord {
            timestamp_ms: ts,
            accel: [value; 3],
            gyro: [value; 3],
            mag: [value; 3],
            label,
        }
    }

    fn vocab(names: &[&str]) -> Vec<ActivityLabel> {
        names
            .iter()
            .enumerate()
            .map(|(index, name)| ActivityLabel {
                name: name.to_string(),
                index,
            })
            .collect()
    }

    #[test]
    fn sensor_columns_are_contiguous_triples() {
        assert_eq!(SensorKind::Accelerometer.column_offset(), 0);
        assert_eq!(SensorKind::Gyroscope.column_offset(), 3);
        assert_eq!(SensorKind::Magnetometer.column_offset(), 6);
    }

    #[test]
    fn channel_accessors_agree() {
        let r = SyncRecord {
            timestamp_ms: 0,
            accel: [1.0, 2.0, 3.0],
            gyro: [4.0, 5.0, 6.0],
            mag: [7.0, 8.0, 9.0],
            label: 0,
        };
        let all = r.channels();
        for (i, v) in all.iter().enumerate() {
            assert_eq!(r.channel(i), *v);
            assert_eq!(*v, (i + 1) as f64);
        }
        assert_eq!(r.sensor(SensorKind::Gyroscope), [4.0, 5.0, 6.0]);
    }

    #[test]
    fn primary_names_get_fixed_indices() {
        let (vocab, indices) = encode_labels(&["walking", "sitting", "walking"]).unwrap();
        assert_eq!(indices, vec![0, 2, 0]);
        assert_eq!(vocab[0].name, "walking");
        assert_eq!(vocab[2].name, "sitting");
        assert_eq!(vocab.len(), 4);
    }

    #[test]
    fn lying_alone_still_maps_to_three() {
        let (vocab, indices) = encode_labels(&["lying"]).unwrap();
        assert_eq!(indices, vec![3]);
        assert_eq!(vocab[3].name, "lying");
    }

    #[test]
    fn unknown_names_fall_back_to_first_appearance() {
        let (vocab, indices) = encode_labels(&["running", "standing"]).unwrap();
        assert_eq!(indices, vec![0, 1]);
        assert_eq!(vocab.len(), 2);
        assert_eq!(vocab[0].name, "running");
        assert_eq!(vocab[1].name, "standing");
    }

    #[test]
    fn unknown_names_append_after_fixed_block() {
        let (vocab, indices) = encode_labels(&["jogging", "walking", "jogging"]).unwrap();
        assert_eq!(indices, vec![4, 0, 4]);
        assert_eq!(vocab[4].name, "jogging");
        assert_eq!(vocab.len(), 5);
    }

    #[test]
    fn first_appearance_ignores_fixed_block() {
        let (vocab, indices) =
            encode_labels_with(&["walking", "running"], LabelEncoding::FirstAppearance).unwrap();
        assert_eq!(indices, vec![0, 1]);
        assert_eq!(vocab.len(), 2);
    }

    #[test]
    fn empty_name_is_rejected() {
        assert!(matches!(
            encode_labels(&["walking", ""]),
            Err(DataError::EmptyLabelName { row: 1 })
        ));
    }

    #[test]
    fn label_round_trip() {
        let raw = ["walking", "lying", "jogging", "sitting", "working"];
        let (vocab, indices) = encode_labels(&raw).unwrap();
        for (name, index) in raw.iter().zip(indices) {
            assert_eq!(vocab[index].name, *name);
        }
    }

    #[test]
    fn dataset_sorts_rows_by_timestamp() {
        let rows = vec![record(30, 1.0, 0), record(10, 2.0, 0), record(20, 3.0, 0)];
        let ds = Dataset::new(rows, vocab(&["walking"])).unwrap();
        let ts: Vec<i64> = ds.rows().iter().map(|r| r.timestamp_ms).collect();
        assert_eq!(ts, vec![10, 20, 30]);
    }

    #[test]
    fn dataset_rejects_non_finite_channels() {
        let mut bad = record(0, 1.0, 0);
        bad.mag[1] = f64::NAN;
        let err = Dataset::new(vec![bad], vocab(&["walking"])).unwrap_err();
        assert!(matches!(
            err,
            DataError::NonFiniteChannel { row: 0, channel: 7 }
        ));
    }

    #[test]
    fn dataset_rejects_out_of_range_labels() {
        let err = Dataset::new(vec![record(0, 1.0, 1)], vocab(&["walking"])).unwrap_err();
        assert!(matches!(err, DataError::LabelOutOfRange { .. }));
    }

    #[test]
    fn dataset_rejects_sparse_vocabulary() {
        let bad = vec![ActivityLabel {
            name: "walking".into(),
            index: 3,
        }];
        assert!(matches!(
            Dataset::new(vec![], bad),
            Err(DataError::VocabularyNotDense { .. })
        ));
    }

    #[test]
    fn split_sizes_follow_floor_rule() {
        let split = split_indices(10, 0.8, 1).unwrap();
        assert_eq!(split.train_indices.len(), 8);
        assert_eq!(split.test_indices.len(), 2);

        let split = split_indices(3239, 0.8, 1).unwrap();
        assert_eq!(split.train_indices.len(), 2591);
        assert_eq!(split.test_indices.len(), 648);
    }

    #[test]
    fn split_is_deterministic() {
        let a = split_indices(100, 0.8, 42).unwrap();
        let b = split_indices(100, 0.8, 42).unwrap();
        assert_eq!(a, b);
        let c = split_indices(100, 0.8, 43).unwrap();
        assert_ne!(a.train_indices, c.train_indices);
    }

    #[test]
    fn split_is_a_partition() {
        let split = split_indices(57, 0.33, 9).unwrap();
        let mut seen = [false; 57];
        for &i in split.train_indices.iter().chain(&split.test_indices) {
            assert!(!seen[i], "index {i} appears twice");
            seen[i] = true;
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn split_rejects_bad_arguments() {
        assert!(matches!(
            split_indices(1, 0.8, 0),
            Err(DataError::TooFewRows { .. })
        ));
        for ratio in [0.0, 1.0, -0.5, 1.5, f64::NAN] {
            assert!(matches!(
                split_indices(10, ratio, 0),
                Err(DataError::InvalidSplitRatio { .. })
            ));
        }
    }
}
