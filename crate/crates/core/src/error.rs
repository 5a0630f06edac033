use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("data row {row}: expected {expected} cells, found {found}")]
    RowArity {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("data row {row}, column `{column}`: cannot parse `{value}` as a number")]
    NumericCell {
        column: String,
        row: usize,
        value: String,
    },

    #[error("data row {row}, column `{column}`: missing values (`?`) are not supported")]
    MissingValue { column: String, row: usize },

    #[error("column `{column}`: value `{value}` is not in the declared value list")]
    UnknownCategory { column: String, value: String },

    #[error("class column `{column}` has {count} distinct values, expected 2")]
    ClassCount { column: String, count: usize },

    #[error("class `{class}` has {count} instances, need at least {required}")]
    InsufficientClass {
        class: String,
        count: usize,
        required: usize,
    },

    #[error("expected {expected} feature columns, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("missing fold files: {}", .files.join(", "))]
    MissingFoldFiles { files: Vec<String> },

    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("cell (dataset={dataset}, fold={fold}, model={model}, scaler={scaler}): {source}")]
    Cell {
        dataset: String,
        fold: usize,
        model: String,
        scaler: String,
        #[source]
        source: Box<Error>,
    },

    #[error("results are missing cells: {}", .keys.join("; "))]
    MissingCells { keys: Vec<String> },

    #[error("config: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
