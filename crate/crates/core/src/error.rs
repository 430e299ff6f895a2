//! Error type shared by every module in the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, SdfError>;

/// Everything that can go wrong while loading data, estimating signed
/// distances, fitting models, or running experiment suites.
#[derive(Debug, Error)]
pub enum SdfError {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("{path}: file has no data rows")]
    EmptyFile { path: String },

    #[error("{path}: row {row}, column {column:?}: cannot parse {value:?} as a finite number")]
    NonNumericCell {
        path: String,
        row: usize,
        column: String,
        value: String,
    },

    #[error("label column {column:?} has {count} distinct value(s); a binary dataset needs exactly 2")]
    NotBinary { column: String, count: usize },

    #[error("positive label {label:?} does not occur in the label column (found {found:?})")]
    MissingPositiveLabel { label: String, found: Vec<String> },

    #[error("column {0:?} not found in the CSV header")]
    ColumnNotFound(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("length mismatch: {left} values vs {right} values")]
    LengthMismatch { left: usize, right: usize },

    #[error("no opposite-class point: the dataset contains no {missing} samples")]
    SingleClass { missing: &'static str },

    #[error("coincident opposite-label points at indices {i} and {j} (distance 0)")]
    CoincidentOpposites { i: usize, j: usize },

    #[error("factorization failed at pivot {pivot}: diagonal value {value:e} is not positive")]
    Factorization { pivot: usize, value: f64 },

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("stratification impossible: class {label} has only {count} member(s)")]
    Stratification { label: &'static str, count: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),
}

impl SdfError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        SdfError::InvalidParameter(msg.into())
    }
}
