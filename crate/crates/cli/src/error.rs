use thiserror::Error;
use varlab_core::elliptic::EllipticError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("row {row}: expected {expected} cells, found {found}")]
    Ragged { row: usize, expected: usize, found: usize },
    #[error("row {row}, column {column}: `{value}` is not a number")]
    BadCell { row: usize, column: usize, value: String },
    #[error("row {row}: weight `{value}` must be positive")]
    NonPositiveWeight { row: usize, value: String },
    #[error("no column named `{0}`")]
    MissingColumn(String),
    #[error("input has no data rows")]
    NoData,
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Core(#[from] varlab_core::Error),
    #[error(transparent)]
    Elliptic(#[from] EllipticError),
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("cannot write output: {0}")]
    Output(String),
    #[error("internal invariant violated: {0}")]
    InvariantBreach(String),
}

impl CliError {
    /// 2 for anything wrong with the input, 3 when an internal invariant
    /// fails.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::InvariantBreach(_) => 3,
            _ => 2,
        }
    }
}
