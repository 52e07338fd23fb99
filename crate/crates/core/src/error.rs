use std::path::PathBuf;

use thiserror::Error;

use crate::grid::CellIndex;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cell {cell} is outside a {nrows}x{ncols} grid")]
    OutOfBounds {
        cell: CellIndex,
        nrows: usize,
        ncols: usize,
    },

    #[error("unit error: {0}")]
    Units(String),

    #[error("grid too small: {0}")]
    Size(String),

    #[error("invalid geometry: {0}")]
    Geometry(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("empty domain: {0}")]
    EmptyDomain(String),

    #[error("lookup failed: {0}")]
    Lookup(String),

    #[error("coverage error: {0}")]
    Coverage(String),

    #[error("dataset validation failed with {} violation(s):\n  {}", .0.len(), .0.join("\n  "))]
    Validation(Vec<String>),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures of the filesystem rather than of the data.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io { .. })
    }
}
