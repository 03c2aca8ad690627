//! Error taxonomy shared across the crate.
//!
//! Every fallible operation returns [`Error`], which carries enough context to
//! name the offending input (block, row/column, parameter) without the caller
//! re-deriving it. Errors are grouped into coarse [`ErrorCategory`] values so
//! front-ends can map them onto process exit codes.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Coarse classification of an [`Error`], used by callers (notably the CLI)
/// to choose exit codes and error channels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    /// Invalid configuration or parameters supplied by the caller.
    Usage,
    /// Malformed or unreadable input data (files, matrices, group layouts).
    Data,
    /// The data are valid but statistically unusable: degenerate variance,
    /// singular blocks, too few observations, or a statistic whose
    /// preconditions on the dimensions fail.
    Degeneracy,
}

/// Unified error type for the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A scalar parameter is outside its documented domain.
    #[error("invalid parameter `{name}`: {message} (got {value})")]
    InvalidParameter {
        name: &'static str,
        message: String,
        value: String,
    },

    /// A matrix or dataset failed structural validation.
    #[error("invalid data: {0}")]
    InvalidData(String),

    /// A data value failed validation at a known location. Row and column are
    /// 1-based; for CSV input the row refers to the file line.
    #[error("invalid value at row {row}, column {column}: {message}")]
    InvalidValue {
        row: usize,
        column: usize,
        message: String,
    },

    /// A block specification does not fit the matrix it addresses.
    #[error("invalid block specification: {0}")]
    InvalidBlockSpec(String),

    /// A matrix expected to be symmetric is not, beyond tolerance.
    #[error("matrix `{name}` is not symmetric: max asymmetry {asymmetry:.3e} exceeds tolerance {tolerance:.3e}")]
    NotSymmetric {
        name: &'static str,
        asymmetry: f64,
        tolerance: f64,
    },

    /// Too few observations to form the requested quantity.
    #[error("insufficient observations: {message} (got {got})")]
    InsufficientObservations { message: String, got: usize },

    /// A variance estimate required to be positive came out non-positive.
    #[error("degenerate variance estimate `{name}` = {value:.6e}; the normalized statistic is undefined")]
    DegenerateVariance { name: &'static str, value: f64 },

    /// A covariance block that must be positive definite is numerically
    /// singular (a Cholesky pivot was non-positive).
    #[error("covariance block `{block}` is singular or indefinite (Cholesky pivot {pivot:.6e} at index {index})")]
    SingularBlock {
        block: &'static str,
        pivot: f64,
        index: usize,
    },

    /// A statistic cannot be computed for these dimensions.
    #[error("statistic `{statistic}` unavailable: {constraint}")]
    StatisticUnavailable {
        statistic: &'static str,
        constraint: String,
    },

    /// An evaluation input (edge list, group reference) is inconsistent.
    #[error("invalid evaluation input: {0}")]
    InvalidEvaluation(String),

    /// An I/O failure while reading or writing files.
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    /// A CSV file could not be parsed.
    #[error("csv error in {path}: {message}")]
    Csv { path: String, message: String },
}

impl Error {
    /// Classify this error for exit-code mapping.
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::InvalidParameter { .. } | Error::InvalidBlockSpec(_) => ErrorCategory::Usage,
            Error::InvalidData(_)
            | Error::InvalidValue { .. }
            | Error::NotSymmetric { .. }
            | Error::InvalidEvaluation(_)
            | Error::Io { .. }
            | Error::Csv { .. } => ErrorCategory::Data,
            Error::InsufficientObservations { .. }
            | Error::DegenerateVariance { .. }
            | Error::SingularBlock { .. }
            | Error::StatisticUnavailable { .. } => ErrorCategory::Degeneracy,
        }
    }

    /// Short machine-readable kind string (used in structured error output).
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidParameter { .. } => "invalid_parameter",
            Error::InvalidData(_) => "invalid_data",
            Error::InvalidValue { .. } => "invalid_value",
            Error::InvalidBlockSpec(_) => "invalid_block_spec",
            Error::NotSymmetric { .. } => "not_symmetric",
            Error::InsufficientObservations { .. } => "insufficient_observations",
            Error::DegenerateVariance { .. } => "degenerate_variance",
            Error::SingularBlock { .. } => "singular_block",
            Error::StatisticUnavailable { .. } => "statistic_unavailable",
            Error::InvalidEvaluation(_) => "invalid_evaluation",
            Error::Io { .. } => "io",
            Error::Csv { .. } => "csv",
        }
    }
}
