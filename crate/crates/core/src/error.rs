use thiserror::Error;

/// Errors raised while building series, validating configurations or
/// evaluating distances.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("sample {index} is not finite ({value})")]
    NonFinite { index: usize, value: f64 },

    #[error("time series needs at least 2 samples, got {len}")]
    TooShort { len: usize },

    #[error("subsequence length {m} is outside [1, {max}] for a series of length {n}", max = n.saturating_sub(1))]
    BadSubseqLen { m: usize, n: usize },

    #[error("p-norm exponent must be a finite real >= 1, got {0}")]
    BadP(f64),

    #[error("exclusion width {exclusion} is outside [1, {max}]")]
    BadExclusion { exclusion: usize, max: usize },

    #[error("flat threshold must be a finite real >= 0, got {0}")]
    BadFlatThreshold(f64),

    #[error("subsequence at {pos} with length {m} runs past the end of a series of length {n}")]
    OutOfRange { pos: usize, m: usize, n: usize },

    #[error("window variance is at or below the flat threshold")]
    Degenerate,

    #[error("engine {engine} cannot compute a {kind} profile")]
    KindMismatch {
        engine: &'static str,
        kind: &'static str,
    },

    #[error("thread pool: {0}")]
    ThreadPool(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
