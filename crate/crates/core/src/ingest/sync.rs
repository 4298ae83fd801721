//! Timestamp join of per-sensor streams into synchronized records.

use crate::data::{encode_labels, Dataset, SensorKind, SyncRecord};
use crate::error::IngestError;
use crate::ingest::csv::Ingested;
use crate::ingest::{RawSensorStream, StreamLabels};

/// Default join window: one sample period at typical IMU rates.
pub const DEFAULT_TOLERANCE_MS: i64 = 50;

/// Joins one stream per sensor into a dataset.
///
/// Accelerometer rows drive the join, earliest first: each one takes the
/// nearest still-unused gyroscope and magnetometer samples within the
/// tolerance (equidistant candidates resolve to the earlier timestamp).
/// Rows lacking a match in either stream are dropped and counted.
pub fn synchronize(
    streams: Vec<RawSensorStream>,
    tolerance_ms: i64,
) -> Result<Ingested, IngestError> {
    let mut by_kind: [Option<RawSensorStream>; 3] = [None, None, None];
    for stream in streams {
        let slot = stream.kind.column_offset() / 3;
        if by_kind[slot].is_some() {
            return Err(IngestError::DuplicateSensor {
                kind: stream.kind.name(),
            });
        }
        by_kind[slot] = Some(stream);
    }
    let [accel, gyro, mag] = by_kind;
    let accel = accel.ok_or(IngestError::MissingSensor {
        kind: SensorKind::Accelerometer.name(),
    })?;
    let gyro = gyro.ok_or(IngestError::MissingSensor {
        kind: SensorKind::Gyroscope.name(),
    })?;
    let mag = mag.ok_or(IngestError::MissingSensor {
        kind: SensorKind::Magnetometer.name(),
    })?;
    for stream in [&accel, &gyro, &mag] {
        if stream.samples.is_empty() {
            return Err(IngestError::EmptyStream {
                kind: stream.kind.name(),
            });
        }
    }
    let label_source = [&accel, &gyro, &mag]
        .into_iter()
        .position(|s| s.labels != StreamLabels::None)
        .ok_or(IngestError::MissingLabels)?;

    let mut gyro_match = Matcher::new(&gyro);
    let mut mag_match = Matcher::new(&mag);
    let mut matched = Vec::new();
    let mut dropped = 0usize;
    for (accel_at, &(timestamp, accel_triple)) in accel.samples.iter().enumerate() {
        let gyro_at = gyro_match.peek_nearest(timestamp, tolerance_ms);
        let mag_at = mag_match.peek_nearest(timestamp, tolerance_ms);
        let (Some(gyro_at), Some(mag_at)) = (gyro_at, mag_at) else {
            dropped += 1;
            continue;
        };
        gyro_match.consume(gyro_at);
        mag_match.consume(mag_at);
        matched.push((timestamp, accel_triple, accel_at, gyro_at, mag_at));
    }
    if matched.is_empty() {
        return Err(IngestError::EmptyJoin { tolerance_ms });
    }

    let names: Vec<&str> = matched
        .iter()
        .map(|&(_, _, accel_at, gyro_at, mag_at)| {
            let (stream, index) = match label_source {
                0 => (&accel, accel_at),
                1 => (&gyro, gyro_at),
                _ => (&mag, mag_at),
            };
            stream.label_at(index).expect("labelled stream")
        })
        .collect();
    let (vocabulary, indices) = encode_labels(&names)?;
    let rows = matched
        .iter()
        .zip(indices)
        .map(|(&(timestamp, accel_triple, _, gyro_at, mag_at), label)| SyncRecord {
            timestamp_ms: timestamp,
            accel: accel_triple,
            gyro: gyro.samples[gyro_at].1,
            mag: mag.samples[mag_at].1,
            label,
        })
        .collect();
    Ok(Ingested {
        dataset: Dataset::new(rows, vocabulary)?,
        dropped_rows: dropped,
    })
}

/// Nearest-unused lookup over one stream's sorted timestamps.
struct Matcher<'a> {
    samples: &'a [(i64, [f64; 3])],
    used: Vec<bool>,
}

impl<'a> Matcher<'a> {
    fn new(stream: &'a RawSensorStream) -> Matcher<'a> {
        Matcher {
            samples: &stream.samples,
            used: vec![false; stream.samples.len()],
        }
    }

    /// Index of the nearest unused sample within tolerance, preferring
    /// the earlier timestamp on an exact distance tie.
    fn peek_nearest(&self, target: i64, tolerance_ms: i64) -> Option<usize> {
        let start = self.samples.partition_point(|&(t, _)| t < target);
        let mut best: Option<(i64, usize)> = None;
        // Earlier side first so a distance tie keeps the earlier sample.
        let mut index = start;
        while index > 0 {
            index -= 1;
            let distance = target - self.samples[index].0;
            if distance > tolerance_ms || best.is_some_and(|(d, _)| distance >= d) {
                break;
            }
            if !self.used[index] {
                best = Some((distance, index));
            }
        }
        let mut index = start;
        while index < self.samples.len() {
            let distance = self.samples[index].0 - target;
            if distance > tolerance_ms || best.is_some_and(|(d, _)| distance >= d) {
                break;
            }
            if !self.used[index] {
                best = Some((distance, index));
            }
            index += 1;
        }
        best.map(|(_, index)| index)
    }

    fn consume(&mut self, index: usize) {
        self.used[index] = true;
    }
}
