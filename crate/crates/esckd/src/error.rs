use thiserror::Error;

/// Errors surfaced by construction, analysis, and I/O routines.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter is outside its documented domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A probability table failed validation (negative entry, bad total).
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    /// An operator set failed a measurement-validity check.
    #[error("invalid measurement: {0}")]
    InvalidMeasurement(String),

    /// The ensemble does not resolve the identity closely enough for the
    /// requested operation.
    #[error("ensemble is not tight: frame-operator deviation {deviation:.3e} exceeds {tolerance:.3e}")]
    NotTight { deviation: f64, tolerance: f64 },

    /// An iterative routine finished without meeting its tolerance.
    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
