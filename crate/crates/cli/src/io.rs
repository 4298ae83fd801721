//! Dataset loading and atomic output staging.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use sensorfuse::{
    generate_synthetic, parse_primary_csv, parse_secondary_csv, synchronize, Dataset, Ingested,
    ParsedPrimary, SecondaryAdapter,
};

use crate::config::{DatasetKind, RunConfig};
use crate::error::CliError;

/// Reads the configured dataset. Every path yields a synchronized,
/// labeled dataset with at least two rows, or an error before any
/// output exists.
pub fn load_dataset(config: &RunConfig) -> Result<Dataset, CliError> {
    let dataset = match config.dataset_kind {
        DatasetKind::Synthetic => {
            if !config.input.is_empty() {
                return Err(CliError::Config(
                    "synthetic datasets are generated, not read; drop --input or change \
                     --dataset-kind"
                        .into(),
                ));
            }
            generate_synthetic(&config.synth.to_synth_config(config.seed))?
        }
        DatasetKind::Primary => load_primary(config)?,
        DatasetKind::Secondary => load_secondary(config)?,
    };
    if dataset.len() < 2 {
        return Err(CliError::Input(format!(
            "dataset has {} row(s); need at least 2",
            dataset.len()
        )));
    }
    Ok(dataset)
}

fn note_dropped(dropped: usize) {
    if dropped > 0 {
        eprintln!("note: dropped {dropped} malformed or non-joinable row(s)");
    }
}

fn read_file(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|err| CliError::read(path, err))
}

fn load_primary(config: &RunConfig) -> Result<Dataset, CliError> {
    match config.input.len() {
        1 => {
            let path = &config.input[0];
            let bytes = read_file(path)?;
            match parse_primary_csv(&bytes)? {
                ParsedPrimary::Dataset(Ingested {
                    dataset,
                    dropped_rows,
                }) => {
                    note_dropped(dropped_rows);
                    Ok(dataset)
                }
                ParsedPrimary::Stream { stream, .. } => Err(CliError::Input(format!(
                    "{} holds a single {} stream; pass all three per-sensor files via \
                     repeated --input flags",
                    path.display(),
                    stream.kind
                ))),
            }
        }
        3 => {
            let mut streams = Vec::with_capacity(3);
            let mut dropped = 0;
            for path in &config.input {
                let bytes = read_file(path)?;
                match parse_primary_csv(&bytes)? {
                    ParsedPrimary::Stream {
                        stream,
                        dropped_rows,
                    } => {
                        dropped += dropped_rows;
                        streams.push(stream);
                    }
                    ParsedPrimary::Dataset(_) => {
                        return Err(CliError::Input(format!(
                            "{} is already a synchronized dataset; pass it as the only --input",
                            path.display()
                        )));
                    }
                }
            }
            let ingested = synchronize(streams, config.tolerance_ms)?;
            note_dropped(dropped + ingested.dropped_rows);
            Ok(ingested.dataset)
        }
        0 => Err(CliError::Config(
            "this dataset kind reads files; pass --input (once for a synchronized file, \
             three times for per-sensor streams)"
                .into(),
        )),
        n => Err(CliError::Config(format!(
            "expected 1 or 3 --input files, got {n}"
        ))),
    }
}

fn load_secondary(config: &RunConfig) -> Result<Dataset, CliError> {
    let [path] = config.input.as_slice() else {
        return Err(CliError::Config(format!(
            "secondary datasets are a single file; got {} --input flag(s)",
            config.input.len()
        )));
    };
    let adapter = config
        .secondary_adapter
        .clone()
        .unwrap_or_else(SecondaryAdapter::canonical);
    let bytes = read_file(path)?;
    let Ingested {
        dataset,
        dropped_rows,
    } = parse_secondary_csv(&bytes, &adapter)?;
    note_dropped(dropped_rows);
    Ok(dataset)
}

/// Output files staged in memory and written only when the whole
/// command has succeeded. Each file goes to a temporary sibling first
/// and is renamed into place, so a failed run leaves nothing behind.
pub struct Artifacts {
    out_dir: PathBuf,
    files: Vec<(PathBuf, Vec<u8>)>,
}

impl Artifacts {
    pub fn new(out_dir: &Path) -> Artifacts {
        Artifacts {
            out_dir: out_dir.to_path_buf(),
            files: Vec::new(),
        }
    }

    /// Stages one file at `relative` under the output directory.
    pub fn add(&mut self, relative: impl AsRef<Path>, bytes: Vec<u8>) {
        self.files.push((relative.as_ref().to_path_buf(), bytes));
    }

    /// Writes every staged file and prints one `wrote` line per path.
    pub fn commit(self) -> Result<(), CliError> {
        for (relative, bytes) in &self.files {
            let path = self.out_dir.join(relative);
            let parent = path.parent().unwrap_or(&self.out_dir);
            fs::create_dir_all(parent).map_err(|err| CliError::write(parent, err))?;
            let mut temp = tempfile::NamedTempFile::new_in(parent)
                .map_err(|err| CliError::write(parent, err))?;
            temp.write_all(bytes)
                .map_err(|err| CliError::write(&path, err))?;
            temp.persist(&path)
                .map_err(|err| CliError::write(&path, err.error))?;
            println!("wrote {}", path.display());
        }
        Ok(())
    }
}
