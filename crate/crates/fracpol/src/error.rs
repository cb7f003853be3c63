//! Crate-wide error type.

use thiserror::Error;

/// Errors shared across the geometry, rearrangement, operator and harness layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("shape does not fit inside the grid box: {0}")]
    ShapeOutsideGrid(String),

    #[error("polarizer is not compatible with the grid: {0}")]
    IncompatiblePolarizer(String),

    #[error("negative input where a nonnegative function is required: {0}")]
    NegativeInput(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("function is identically zero")]
    ZeroFunction,

    #[error("unsupported exponent p: {0}")]
    UnsupportedP(String),

    #[error("domain mask is empty")]
    EmptyDomain,

    #[error("supercritical q: q={q}, p*_s={p_star}")]
    SupercriticalQ { q: f64, p_star: f64 },

    #[error("HoleEscapesDomain: {0}")]
    HoleEscapesDomain(String),

    #[error("AsymmetricInput: {0}")]
    AsymmetricInput(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("validation error: {0}")]
    Validation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
