//! Error type shared by every module.

use thiserror::Error;

/// Failures reported by the numerical routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("value out of range: {0}")]
    OutOfRange(String),
    #[error("spectral condition violated: |alpha| = {alpha} must exceed {bound}")]
    SpectralCondition { alpha: f64, bound: f64 },
    #[error("singular operator: {0}")]
    Singular(String),
    #[error("series did not converge after {terms} terms (last term {last:e})")]
    Divergence { terms: usize, last: f64 },
    #[error("stability limit violated: {0}")]
    Stability(String),
    #[error("contract violated: {0}")]
    Contract(String),
    #[error("resolution insufficient: {0}")]
    Resolution(String),
    #[error("fit failed: {0}")]
    Fit(String),
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
