//! CSV codec: the canonical 11-column layout, per-sensor stream files,
//! the adapter-mapped secondary layout, and the canonical writer.
//!
//! Cleaning rules shared by all parsers: a row with any empty cell or any
//! non-finite channel value is dropped and counted; a non-empty cell that
//! fails to parse is an error, not a drop.

use crate::data::{
    encode_labels_with, Dataset, LabelEncoding, SensorKind, SyncRecord, CHANNEL_COLUMNS,
    CHANNEL_SLUGS, LABEL_COLUMN, TIMESTAMP_COLUMN,
};
use crate::error::IngestError;
use crate::fusion::kalman::{FilteredDataset, FILTERED_COLUMNS};
use crate::ingest::RawSensorStream;
use chrono::{DateTime, NaiveDateTime};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::Write;

/// A parsed dataset plus the number of rows dropped by cleaning.
#[derive(Debug, Clone, PartialEq)]
pub struct Ingested {
    pub dataset: Dataset,
    pub dropped_rows: usize,
}

/// What a primary-layout file turned out to contain.
#[derive(Debug, Clone, PartialEq)]
pub enum ParsedPrimary {
    /// All nine channels plus a label column: a synchronized dataset.
    Dataset(Ingested),
    /// A single sensor's three channels: one raw stream to synchronize.
    Stream {
        stream: RawSensorStream,
        dropped_rows: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ColumnRole {
    Timestamp,
    Channel(usize),
    Label,
}

/// Lower-cases, strips parenthesized unit suffixes, collapses whitespace.
fn normalize_header(name: &str) -> String {
    let mut cleaned = String::with_capacity(name.len());
    let mut depth = 0usize;
    for ch in name.chars() {
        match ch {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            _ if depth == 0 => cleaned.push(ch.to_ascii_lowercase()),
            _ => {}
        }
    }
    cleaned.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn classify_header(name: &str) -> Option<ColumnRole> {
    let normalized = normalize_header(name);
    if let Some(channel) = CHANNEL_COLUMNS
        .iter()
        .position(|c| normalize_header(c) == normalized)
    {
        return Some(ColumnRole::Channel(channel));
    }
    match normalized.as_str() {
        "timestamp" | "time" => Some(ColumnRole::Timestamp),
        "label" | "activity" | "activity class" => Some(ColumnRole::Label),
        _ => None,
    }
}

/// Integer milliseconds, fractional milliseconds (truncated), or an
/// ISO-8601 date-time with or without an offset.
fn parse_timestamp_ms(value: &str) -> Option<i64> {
    let value = value.trim();
    if let Ok(ms) = value.parse::<i64>() {
        return Some(ms);
    }
    if let Ok(ms) = value.parse::<f64>() {
        if ms.is_finite() {
            return Some(ms.trunc() as i64);
        }
        return None;
    }
    if let Ok(dt) = DateTime::parse_from_rfc3339(value) {
        return Some(dt.timestamp_millis());
    }
    for format in ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f"] {
        if let Ok(dt) = NaiveDateTime::parse_from_str(value, format) {
            return Some(dt.and_utc().timestamp_millis());
        }
    }
    None
}

fn parse_channel_cell(value: &str, row: u64, column: &str) -> Result<Option<f64>, IngestError> {
    let trimmed = value.trim();
    if trimmed.is_empty() {
        return Ok(None);
    }
    let parsed: f64 = trimmed
        .parse()
        .map_err(|_| IngestError::NonNumericCell {
            row,
            column: column.to_string(),
            value: trimmed.to_string(),
        })?;
    // Parseable but non-finite counts as missing data, not a format error.
    Ok(parsed.is_finite().then_some(parsed))
}

fn record_line(record: &::csv::StringRecord) -> u64 {
    record.position().map_or(0, |p| p.line())
}

/// Parses a primary-layout CSV. A file carrying all nine channels and a
/// label column yields a [`Dataset`]; a file carrying exactly one
/// sensor's three channels yields a [`RawSensorStream`] (its label column
/// is optional). Any unrecognized column is a schema error.
pub fn parse_primary_csv(bytes: &[u8]) -> Result<ParsedPrimary, IngestError> {
    let mut reader = ::csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(bytes);
    let headers = reader.headers()?.clone();
    let mut roles = Vec::with_capacity(headers.len());
    let mut seen = [false; 11];
    for name in headers.iter() {
        let role = classify_header(name).ok_or_else(|| IngestError::UnknownColumn {
            name: name.to_string(),
        })?;
        let slot = match role {
            ColumnRole::Timestamp => 0,
            ColumnRole::Channel(c) => 1 + c,
            ColumnRole::Label => 10,
        };
        if seen[slot] {
            return Err(IngestError::DuplicateColumn {
                name: name.to_string(),
            });
        }
        seen[slot] = true;
        roles.push(role);
    }
    if !seen[0] {
        return Err(IngestError::Layout {
            message: "no timestamp column".into(),
        });
    }
    let present: Vec<usize> = (0..9).filter(|c| seen[1 + c]).collect();
    let has_label = seen[10];

    if present.len() == 9 {
        if !has_label {
            return Err(IngestError::Layout {
                message: "nine channels but no label column".into(),
            });
        }
        let (rows, dropped) = read_full_rows(&mut reader, &roles)?;
        return Ok(ParsedPrimary::Dataset(build_dataset(
            rows,
            dropped,
            LabelEncoding::PrimaryProtocol,
        )?));
    }

    // A per-sensor file must carry exactly one sensor's triple.
    let kind = SensorKind::ALL
        .into_iter()
        .find(|k| {
            let offset = k.column_offset();
            present == [offset, offset + 1, offset + 2]
        })
        .ok_or_else(|| IngestError::Layout {
            message: format!(
                "expected all nine channels or one sensor's three; found {} channel column(s)",
                present.len()
            ),
        })?;
    let (samples, labels, dropped) = read_stream_rows(&mut reader, &roles, kind, has_label)?;
    Ok(ParsedPrimary::Stream {
        stream: RawSensorStream::new(kind, samples, labels)?,
        dropped_rows: dropped,
    })
}

type LabeledRow = (i64, [f64; 9], String);

fn read_full_rows(
    reader: &mut ::csv::Reader<&[u8]>,
    roles: &[ColumnRole],
) -> Result<(Vec<LabeledRow>, usize), IngestError> {
    let mut rows = Vec::new();
    let mut dropped = 0usize;
    for result in reader.records() {
        let record = result?;
        let line = record_line(&record);
        let mut timestamp = None;
        let mut channels = [f64::NAN; 9];
        let mut channel_missing = false;
        let mut label = String::new();
        for (role, value) in roles.iter().zip(record.iter()) {
            match role {
                ColumnRole::Timestamp => {
                    let trimmed = value.trim();
                    if trimmed.is_empty() {
                        continue;
                    }
                    timestamp = Some(parse_timestamp_ms(trimmed).ok_or_else(|| {
                        IngestError::BadTimestamp {
                            row: line,
                            value: trimmed.to_string(),
                        }
                    })?);
                }
                ColumnRole::Channel(c) => {
                    match parse_channel_cell(value, line, CHANNEL_COLUMNS[*c])? {
                        Some(parsed) => channels[*c] = parsed,
                        None => channel_missing = true,
                    }
                }
                ColumnRole::Label => label = value.trim().to_string(),
            }
        }
        match timestamp {
            Some(ts) if !channel_missing && !label.is_empty() => {
                rows.push((ts, channels, label));
            }
            _ => dropped += 1,
        }
    }
    Ok((rows, dropped))
}

fn build_dataset(
    rows: Vec<LabeledRow>,
    dropped_rows: usize,
    encoding: LabelEncoding,
) -> Result<Ingested, IngestError> {
    let names: Vec<&str> = rows.iter().map(|(_, _, label)| label.as_str()).collect();
    let (vocabulary, indices) = encode_labels_with(&names, encoding)?;
    let records = rows
        .iter()
        .zip(indices)
        .map(|((ts, ch, _), label)| SyncRecord {
            timestamp_ms: *ts,
            accel: [ch[0], ch[1], ch[2]],
            gyro: [ch[3], ch[4], ch[5]],
            mag: [ch[6], ch[7], ch[8]],
            label,
        })
        .collect();
    Ok(Ingested {
        dataset: Dataset::new(records, vocabulary)?,
        dropped_rows,
    })
}

type StreamRows = (Vec<(i64, [f64; 3])>, Option<Vec<String>>, usize);

fn read_stream_rows(
    reader: &mut ::csv::Reader<&[u8]>,
    roles: &[ColumnRole],
    kind: SensorKind,
    has_label: bool,
) -> Result<StreamRows, IngestError> {
    let offset = kind.column_offset();
    let mut samples = Vec::new();
    let mut labels = has_label.then(Vec::new);
    let mut dropped = 0usize;
    for result in reader.records() {
        let record = result?;
        let line = record_line(&record);
        let mut timestamp = None;
        let mut triple = [f64::NAN; 3];
        let mut missing = false;
        let mut label = String::new();
        for (role, value) in roles.iter().zip(record.iter()) {
            match role {
                ColumnRole::Timestamp => {
                    let trimmed = value.trim();
                    if trimmed.is_empty() {
                        continue;
                    }
                    timestamp = Some(parse_timestamp_ms(trimmed).ok_or_else(|| {
                        IngestError::BadTimestamp {
                            row: line,
                            value: trimmed.to_string(),
                        }
                    })?);
                }
                ColumnRole::Channel(c) => {
                    match parse_channel_cell(value, line, CHANNEL_COLUMNS[*c])? {
                        Some(parsed) => triple[*c - offset] = parsed,
                        None => missing = true,
                    }
                }
                ColumnRole::Label => label = value.trim().to_string(),
            }
        }
        match timestamp {
            Some(ts) if !missing && (!has_label || !label.is_empty()) => {
                samples.push((ts, triple));
                if let Some(labels) = labels.as_mut() {
                    labels.push(label);
                }
            }
            _ => dropped += 1,
        }
    }
    Ok((samples, labels, dropped))
}

/// Column mapping for a foreign CSV layout: where to find the timestamp,
/// the label, and each canonical channel (keyed by channel slug).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecondaryAdapter {
    pub timestamp: String,
    pub label: String,
    /// Canonical slug (e.g. `acceleration_x`) → source column name.
    pub channels: BTreeMap<String, String>,
}

impl SecondaryAdapter {
    /// A mapping for files already following the canonical headers.
    pub fn canonical() -> SecondaryAdapter {
        SecondaryAdapter {
            timestamp: TIMESTAMP_COLUMN.to_string(),
            label: LABEL_COLUMN.to_string(),
            channels: CHANNEL_SLUGS
                .iter()
                .zip(CHANNEL_COLUMNS)
                .map(|(slug, column)| (slug.to_string(), column.to_string()))
                .collect(),
        }
    }

    /// Requires a source column for every canonical channel.
    pub fn validate(&self) -> Result<(), IngestError> {
        for slug in CHANNEL_SLUGS {
            if !self.channels.contains_key(slug) {
                return Err(IngestError::AdapterMissingChannel {
                    channel: slug.to_string(),
                });
            }
        }
        Ok(())
    }
}

/// Parses a foreign-layout CSV through a [`SecondaryAdapter`]. Columns not
/// named by the adapter are ignored; labels are encoded in
/// first-appearance order.
pub fn parse_secondary_csv(
    bytes: &[u8],
    adapter: &SecondaryAdapter,
) -> Result<Ingested, IngestError> {
    adapter.validate()?;
    let mut reader = ::csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(bytes);
    let headers = reader.headers()?.clone();
    let find = |wanted: &str| -> Result<usize, IngestError> {
        headers
            .iter()
            .position(|h| h.trim().eq_ignore_ascii_case(wanted.trim()))
            .ok_or_else(|| IngestError::Layout {
                message: format!("source column {wanted:?} not found"),
            })
    };
    let timestamp_at = find(&adapter.timestamp)?;
    let label_at = find(&adapter.label)?;
    let mut channel_at = [0usize; 9];
    for (channel, slug) in CHANNEL_SLUGS.iter().enumerate() {
        channel_at[channel] = find(&adapter.channels[*slug])?;
    }

    let mut rows = Vec::new();
    let mut dropped = 0usize;
    for result in reader.records() {
        let record = result?;
        let line = record_line(&record);
        let timestamp_cell = record.get(timestamp_at).unwrap_or("").trim();
        let label = record.get(label_at).unwrap_or("").trim().to_string();
        let mut channels = [f64::NAN; 9];
        let mut missing = timestamp_cell.is_empty() || label.is_empty();
        for (channel, &at) in channel_at.iter().enumerate() {
            let cell = record.get(at).unwrap_or("");
            match parse_channel_cell(cell, line, CHANNEL_COLUMNS[channel])? {
                Some(parsed) => channels[channel] = parsed,
                None => missing = true,
            }
        }
        if missing {
            dropped += 1;
            continue;
        }
        let timestamp =
            parse_timestamp_ms(timestamp_cell).ok_or_else(|| IngestError::BadTimestamp {
                row: line,
                value: timestamp_cell.to_string(),
            })?;
        rows.push((timestamp, channels, label));
    }
    build_dataset(rows, dropped, LabelEncoding::FirstAppearance)
}

/// The canonical header row: timestamp, nine channels, label.
pub fn canonical_header() -> Vec<&'static str> {
    let mut header = vec![TIMESTAMP_COLUMN];
    header.extend(CHANNEL_COLUMNS);
    header.push(LABEL_COLUMN);
    header
}

fn record_fields(dataset: &Dataset, record: &SyncRecord) -> Vec<String> {
    let mut fields = Vec::with_capacity(11);
    fields.push(record.timestamp_ms.to_string());
    for channel in 0..9 {
        fields.push(record.channel(channel).to_string());
    }
    fields.push(dataset.label_name(record.label).to_string());
    fields
}

/// Writes the canonical 11-column CSV. Channel values print in the
/// shortest form that parses back to the same bits, so a write/parse
/// round trip is lossless.
pub fn write_canonical_csv<W: Write>(dataset: &Dataset, writer: W) -> Result<(), IngestError> {
    let mut csv_writer = ::csv::WriterBuilder::new().from_writer(writer);
    csv_writer.write_record(canonical_header())?;
    for record in dataset.rows() {
        csv_writer.write_record(record_fields(dataset, record))?;
    }
    csv_writer.flush().map_err(::csv::Error::from)?;
    Ok(())
}

/// [`write_canonical_csv`] into a byte buffer.
pub fn canonical_csv_bytes(dataset: &Dataset) -> Vec<u8> {
    let mut bytes = Vec::new();
    write_canonical_csv(dataset, &mut bytes).expect("in-memory write cannot fail");
    bytes
}

/// Writes the canonical columns plus the three filtered-estimate columns.
pub fn write_filtered_csv<W: Write>(
    filtered: &FilteredDataset,
    writer: W,
) -> Result<(), IngestError> {
    let mut csv_writer = ::csv::WriterBuilder::new().from_writer(writer);
    let mut header = canonical_header();
    header.extend(FILTERED_COLUMNS);
    csv_writer.write_record(header)?;
    let dataset = filtered.dataset();
    for (record, estimate) in dataset.rows().iter().zip(filtered.filtered()) {
        let mut fields = record_fields(dataset, record);
        fields.extend(estimate.iter().map(|v| v.to_string()));
        csv_writer.write_record(fields)?;
    }
    csv_writer.flush().map_err(::csv::Error::from)?;
    Ok(())
}
