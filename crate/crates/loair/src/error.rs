//! Error types shared across the crate.

/// Crate-wide error type.
///
/// Variants are grouped by what went wrong rather than where: callers
/// (notably the CLI) map them onto exit codes, so the distinction between
/// usage problems, bad data and numerical failures is part of the contract.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of an operation
    /// (probability outside (0, 1), non-finite input, alpha outside (0, 1)).
    #[error("domain error: {0}")]
    Domain(String),

    /// Invalid configuration (smoothing parameters out of order, zero
    /// patience, split ratios that do not sum to one, ...).
    #[error("configuration error: {0}")]
    Config(String),

    /// Dimension or schema mismatch between two values that must agree.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// A name (column, feature, model) was not found.
    #[error("unknown name: {0}")]
    Lookup(String),

    /// Malformed input data (unparseable cell, missing header, ...).
    #[error("data error: {0}")]
    Data(String),

    /// The design matrix is rank deficient or too ill conditioned to solve.
    #[error("singular design matrix (condition estimate {cond:.3e}): offending columns {columns:?}")]
    Singular { columns: Vec<String>, cond: f64 },

    /// Too few rows to estimate the requested number of coefficients
    /// together with a residual variance.
    #[error("insufficient data: {n} rows cannot support {m} coefficients plus a residual variance estimate")]
    InsufficientData { n: usize, m: usize },

    /// A computation produced a non-finite value.
    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
