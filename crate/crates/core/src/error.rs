use std::path::PathBuf;

/// Errors raised across the toolkit.
///
/// Variants are grouped by the exit-code class they map to in the CLI:
/// configuration, input format / I/O, and solver constraint violations.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("non-finite value at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not symmetric: |A[{row},{col}] - A[{col},{row}]| = {gap:e}")]
    Asymmetric { row: usize, col: usize, gap: f64 },
    #[error("label {label} at position {index} is out of range for k = {k}")]
    Label {
        index: usize,
        label: usize,
        k: usize,
    },
    #[error("cluster {0} has no members")]
    EmptyCluster(usize),
    #[error("cluster {0} has zero volume")]
    Volume(usize),
    #[error("invalid affinity matrix: {0}")]
    Affinity(String),
    #[error("vertex {0} has zero degree")]
    Degree(usize),
    #[error("matrix must be nonnegative: entry ({row}, {col}) = {value}")]
    Nonnegativity { row: usize, col: usize, value: f64 },
    #[error("not a projection matrix: max |PP - P| = {0:e}")]
    Projection(f64),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("format error in {path}: {msg}")]
    Format { path: PathBuf, msg: String },
    #[error("parse error in {path} at row {row}, column {col}: {cell:?}")]
    Parse {
        path: PathBuf,
        row: usize,
        col: usize,
        cell: String,
    },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn dim(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
