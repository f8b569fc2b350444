//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid configuration or parameter value.
    #[error("configuration: {0}")]
    Config(String),

    /// 1-based index outside its valid range.
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    /// Mismatched vector/matrix dimensions.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A numerical routine failed to reach its tolerance.
    #[error("numerical: {0}")]
    Numerical(String),

    /// The sum-of-gammas series hit its term cap before converging.
    #[error("series did not converge: residual mixture mass {residual:.3e} after {terms} terms")]
    SeriesNotConverged { residual: f64, terms: usize },

    /// Chaotic carrier generation kept producing constant orbits.
    #[error("degenerate chaotic orbit persisted through {0} reseed attempts")]
    DegenerateOrbit(usize),

    /// A value that must be finite was not.
    #[error("non-finite value: {0}")]
    NonFinite(String),

    /// Malformed input file or text.
    #[error("parse: {0}")]
    Parse(String),

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
