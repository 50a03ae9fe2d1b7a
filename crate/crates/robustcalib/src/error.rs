//! Error type shared by the whole library.

use thiserror::Error;

/// Errors produced by library operations.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument was outside the mathematical domain of the operation
    /// (non-finite margin, probability outside [0, 1], empty dataset, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A structural precondition was violated (grid too coarse, bad interval
    /// ordering, zero step count, ...).
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The requested analytic formula is not available for this parameter
    /// combination; the numeric engine still covers it.
    #[error("unsupported regime for {family} (beta={beta}, gamma={gamma}): {rule}")]
    UnsupportedRegime {
        family: String,
        beta: f64,
        gamma: f64,
        /// Human-readable description of the supported parameter range.
        rule: String,
    },

    /// A data file could not be parsed.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// Underlying I/O failure, annotated with the path involved.
    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    /// Analytic family metadata disagreed with its numeric cross-check;
    /// indicates a bug, never expected in normal operation.
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
