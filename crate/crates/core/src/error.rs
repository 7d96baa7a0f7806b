//! Crate-wide error type.

/// Errors raised by the signal, decomposition, optimization and pipeline
/// operations.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CoreError {
    /// An argument violates a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The signal has too few samples for the requested operation.
    #[error("signal too short: need at least {needed} samples, got {got}")]
    SignalTooShort { needed: usize, got: usize },

    /// The signal is identically zero (or constant where variation is
    /// required) and the statistic is undefined on it.
    #[error("degenerate signal: {0}")]
    DegenerateSignal(String),

    /// No zero crossing exists in the autocorrelation sequence, so no
    /// period can be located.
    #[error("no periodicity: autocorrelation never crosses zero")]
    NoPeriodicity,

    /// A normalization range has zero or negative width.
    #[error("degenerate range: {0}")]
    DegenerateRange(String),

    /// A configuration violates its invariants.
    #[error("invalid config: {0}")]
    InvalidConfig(String),

    /// A linear solve or other numerical kernel failed to produce a finite
    /// result.
    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    /// Persisted content could not be parsed.
    #[error("parse error: {0}")]
    ParseError(String),

    /// A persisted artifact declares a format version this build does not
    /// understand.
    #[error("version error: found format version {found}, supported {supported}")]
    VersionError { found: u32, supported: u32 },
}

pub type Result<T> = std::result::Result<T, CoreError>;
