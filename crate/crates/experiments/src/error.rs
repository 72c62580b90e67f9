use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = ExperimentError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    /// Malformed input record; `row` is 1-based, not counting the header.
    #[error("row {row}: {message}")]
    Data { row: usize, message: String },

    #[error("invalid dataset: {0}")]
    Dataset(String),

    #[error("invalid manifest: {0}")]
    Manifest(String),

    #[error(transparent)]
    Ranking(#[from] fairrank::Error),

    #[error("bootstrap: {0}")]
    Bootstrap(String),
}

impl ExperimentError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }
}
