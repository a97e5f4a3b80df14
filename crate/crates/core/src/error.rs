//! Error type shared across the library.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A correlation matrix failed the Cholesky positivity check.
    #[error("matrix is not positive semi-definite: pivot {pivot:.6e} at index {index}")]
    NotPositiveSemiDefinite { index: usize, pivot: f64 },

    /// A matrix argument had the wrong shape or violated a structural
    /// requirement (symmetry, unit diagonal, zero self-coupling).
    #[error("bad matrix: {0}")]
    BadMatrix(String),

    /// A network definition violated one or more structural constraints.
    #[error("invalid network: {}", .0.join("; "))]
    InvalidNetwork(Vec<String>),

    /// An operation that needs data received none.
    #[error("empty input: {0}")]
    EmptyInput(String),

    /// Interval extraction produced no valid pairs.
    #[error("empty sample: {0}")]
    EmptySample(String),

    /// A margin was constant, so ranks carry no information.
    #[error("degenerate margin: {0}")]
    DegenerateMargin(String),

    /// A numeric input was NaN or infinite.
    #[error("non-finite value: {0}")]
    NonFinite(String),

    /// An index pair or configuration value was out of range.
    #[error("bad argument: {0}")]
    BadArgument(String),

    /// A CSV or config file could not be parsed.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
