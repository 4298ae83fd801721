//! Process-level error classification. Every failure is folded into one
//! of three exit classes: bad input data (1), a training or numerical
//! failure (2), or a bad configuration (3).

use std::fmt;
use std::path::Path;

use sensorfuse::{DataError, EvalError, FusionError, IngestError, ModelError};

pub const EXIT_INPUT: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;

/// A failure plus the exit class it belongs to.
#[derive(Debug)]
pub enum CliError {
    /// Unreadable, malformed, or unusable input or output files.
    Input(String),
    /// Training, prediction, or numerical failures on valid input.
    Runtime(String),
    /// Contradictory or out-of-range flags and config values.
    Config(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Runtime(_) => EXIT_RUNTIME,
            CliError::Config(_) => EXIT_CONFIG,
        }
    }

    /// A read failure, tagged with the path that caused it.
    pub fn read(path: &Path, err: std::io::Error) -> CliError {
        CliError::Input(format!("cannot read {}: {err}", path.display()))
    }

    /// A write failure, tagged with the path that caused it.
    pub fn write(path: &Path, err: std::io::Error) -> CliError {
        CliError::Input(format!("cannot write {}: {err}", path.display()))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(message)
            | CliError::Runtime(message)
            | CliError::Config(message) => f.write_str(message),
        }
    }
}

impl std::error::Error for CliError {}

impl From<IngestError> for CliError {
    fn from(err: IngestError) -> CliError {
        match err {
            IngestError::InvalidSynthConfig { .. } => CliError::Config(err.to_string()),
            _ => CliError::Input(err.to_string()),
        }
    }
}

impl From<DataError> for CliError {
    fn from(err: DataError) -> CliError {
        match err {
            DataError::InvalidSplitRatio { .. } => CliError::Config(err.to_string()),
            _ => CliError::Input(err.to_string()),
        }
    }
}

impl From<ModelError> for CliError {
    fn from(err: ModelError) -> CliError {
        match err {
            // Hyperparameters only come from flags or the config file.
            ModelError::InvalidHyperparameter { .. } => CliError::Config(err.to_string()),
            // Serialization errors surface when loading a model file.
            ModelError::Document(_) | ModelError::UnsupportedVersion { .. } => {
                CliError::Input(err.to_string())
            }
            _ => CliError::Runtime(err.to_string()),
        }
    }
}

impl From<FusionError> for CliError {
    fn from(err: FusionError) -> CliError {
        match err {
            FusionError::InvalidConfig { .. } | FusionError::EmptySensorSet => {
                CliError::Config(err.to_string())
            }
            FusionError::EmptyDataset => CliError::Input(err.to_string()),
            _ => CliError::Runtime(err.to_string()),
        }
    }
}

impl From<EvalError> for CliError {
    fn from(err: EvalError) -> CliError {
        CliError::Runtime(err.to_string())
    }
}
