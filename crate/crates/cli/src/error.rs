use std::path::{Path, PathBuf};

use thiserror::Error;
use xsl_core::align::TrainError;
use xsl_core::corpus::CorpusError;
use xsl_core::eval::EvalError;
use xsl_core::xgraph::snapshot::SnapshotError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("invalid data: {0}")]
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io { .. } => 3,
            CliError::Numerical(_) => 4,
            CliError::Data(_) => 5,
        }
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_owned(),
            source,
        }
    }

    pub fn corpus(path: &Path, e: CorpusError) -> Self {
        match e {
            CorpusError::Io(source) => CliError::io(path, source),
            CorpusError::Config(m) => CliError::Config(m),
            other => CliError::Data(format!("{}: {other}", path.display())),
        }
    }

    pub fn snapshot(path: &Path, e: SnapshotError) -> Self {
        match e {
            SnapshotError::Io(source) => CliError::io(path, source),
            other => CliError::Data(format!("{}: {other}", path.display())),
        }
    }
}

impl From<TrainError> for CliError {
    fn from(e: TrainError) -> Self {
        match e {
            TrainError::NonFinite { .. } => CliError::Numerical(e.to_string()),
            TrainError::ShapeMismatch { .. } => CliError::Data(e.to_string()),
            TrainError::Config(m) => CliError::Config(m),
        }
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::Train(t) => t.into(),
            EvalError::InvalidK | EvalError::Config(_) | EvalError::InsufficientPairs { .. } => {
                CliError::Config(e.to_string())
            }
            EvalError::EmptyGold | EvalError::Assign(_) | EvalError::Graph(_) => {
                CliError::Data(e.to_string())
            }
        }
    }
}
