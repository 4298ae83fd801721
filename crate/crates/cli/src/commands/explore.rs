//! `explore`: per-channel time series and histograms, plus the 9x9
//! channel correlation matrix as CSV and heatmap.

use sensorfuse::{
    correlation_matrix, histogram, Dataset, CHANNEL_COLUMNS, CHANNEL_SLUGS, TIMESTAMP_COLUMN,
};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::io::{load_dataset, Artifacts};
use crate::svg;

pub fn run(config: &RunConfig) -> Result<(), CliError> {
    let dataset = load_dataset(config)?;
    let correlation = correlation_matrix(&dataset)?;

    let mut artifacts = Artifacts::new(&config.out);
    for (index, slug) in CHANNEL_SLUGS.iter().enumerate() {
        artifacts.add(
            format!("timeseries/{slug}.csv"),
            timeseries_csv(&dataset, index)?,
        );
    }
    for (index, slug) in CHANNEL_SLUGS.iter().enumerate() {
        let column = dataset.channel_column(index);
        let summary = histogram(&column, config.bins)?;
        artifacts.add(
            format!("histograms/{slug}.csv"),
            histogram_csv(&summary.edges, &summary.counts)?,
        );
    }
    artifacts.add("correlation.csv", correlation_csv(&correlation)?);
    artifacts.add(
        "correlation.svg",
        svg::heatmap("Channel correlation", &CHANNEL_SLUGS, &correlation).into_bytes(),
    );
    artifacts.commit()?;
    println!(
        "explored {} rows: 9 time series, 9 histograms, correlation matrix",
        dataset.len()
    );
    Ok(())
}

fn table_error(err: csv::Error) -> CliError {
    CliError::Runtime(format!("cannot render table: {err}"))
}

fn finish(writer: csv::Writer<Vec<u8>>) -> Result<Vec<u8>, CliError> {
    writer
        .into_inner()
        .map_err(|err| CliError::Runtime(format!("cannot render table: {err}")))
}

fn timeseries_csv(dataset: &Dataset, channel: usize) -> Result<Vec<u8>, CliError> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record([TIMESTAMP_COLUMN, CHANNEL_COLUMNS[channel]])
        .map_err(table_error)?;
    for record in dataset.rows() {
        writer
            .write_record([
                record.timestamp_ms.to_string(),
                record.channel(channel).to_string(),
            ])
            .map_err(table_error)?;
    }
    finish(writer)
}

fn histogram_csv(edges: &[f64], counts: &[usize]) -> Result<Vec<u8>, CliError> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record(["bin_start", "bin_end", "count"])
        .map_err(table_error)?;
    for (index, count) in counts.iter().enumerate() {
        writer
            .write_record([
                edges[index].to_string(),
                edges[index + 1].to_string(),
                count.to_string(),
            ])
            .map_err(table_error)?;
    }
    finish(writer)
}

fn correlation_csv(matrix: &[Vec<f64>]) -> Result<Vec<u8>, CliError> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["channel"];
    header.extend(CHANNEL_SLUGS);
    writer.write_record(&header).map_err(table_error)?;
    for (slug, row) in CHANNEL_SLUGS.iter().zip(matrix) {
        let mut fields = vec![slug.to_string()];
        fields.extend(row.iter().map(|value| value.to_string()));
        writer.write_record(&fields).map_err(table_error)?;
    }
    finish(writer)
}
