use std::path::PathBuf;

use thiserror::Error;

use crate::wav::WavError;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("signal length must be at least 1")]
    EmptySignal,

    #[error("signal contains non-finite samples")]
    NonFiniteSignal,

    #[error("signal is degenerate: zero energy")]
    DegenerateSignal,

    #[error("sine frequency out of range: need 1 <= cycles <= n/2, got cycles={cycles}, n={n}")]
    InvalidFrequency { cycles: usize, n: usize },

    #[error("lag count out of range: need 1 <= lags <= n, got lags={lags}, n={n}")]
    LagOutOfRange { lags: usize, n: usize },

    #[error("autocorrelation profile holds {have} lags but {need} are required")]
    InsufficientLags { have: usize, need: usize },

    #[error("filter length must be at least 1")]
    EmptyFilter,

    #[error("filter length {filter_len} exceeds ambient length {ambient}")]
    FilterTooLong { filter_len: usize, ambient: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("probability must lie strictly between 0 and 1, got {0}")]
    InvalidProbability(f64),

    #[error("spectral statistics are degenerate (zero trace or all-zero spectrum)")]
    DegenerateSpectrum,

    #[error(
        "power iteration did not converge after {iterations} iterations \
         (last estimate {estimate:.6e}); the estimate is a lower bound on the top eigenvalue"
    )]
    NoConvergence { estimate: f64, iterations: usize },

    #[error("asymptotic condition estimate undefined: need filters > 4 ln(len), got filters={num_filters}, len={filter_len}")]
    KappaTildeDomain { num_filters: usize, filter_len: usize },

    #[error("at least {min} Monte Carlo trials are required for reliable standard errors, got {trials}")]
    InsufficientTrials { trials: usize, min: usize },

    #[error("wav: {0}")]
    Wav(#[from] WavError),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
