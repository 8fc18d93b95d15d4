//! Error type shared across the library.

use thiserror::Error;

/// Errors produced by problem construction, encoding, simulation, or the
/// branch-and-bound driver.
#[derive(Debug, Error)]
pub enum QrbnbError {
    /// A variable index is out of range for the problem it was used with.
    #[error("variable index {index} out of range for {n_vars} variables")]
    VariableOutOfRange { index: usize, n_vars: usize },

    /// A problem or subproblem is infeasible (no assignment satisfies the
    /// constraints).
    #[error("problem is infeasible: {0}")]
    Infeasible(String),

    /// A size guard tripped: the requested dense/simulated object would be
    /// too large to build.
    #[error("size limit exceeded: {0}")]
    TooLarge(String),

    /// Malformed input data (files, JSON payloads, or structural checks).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Penalty folding was asked to fold a constraint kind it does not
    /// support (only equalities fold).
    #[error("unsupported fold: {0}")]
    UnsupportedFold(String),

    /// The quantumness gap is undefined because the true optimum is zero.
    #[error("undefined gap: {0}")]
    UndefinedGap(String),

    /// A numerical sanity check failed (e.g. an imaginary residue above
    /// tolerance in what must be a real expectation value).
    #[error("numerical anomaly: {0}")]
    Numerical(String),

    /// An iterative routine failed to converge within its budget.
    #[error("no convergence: {0}")]
    NoConvergence(String),

    /// Underlying I/O failure while reading or writing files.
    #[error(transparent)]
    Io(#[from] std::io::Error),

    /// Underlying JSON (de)serialization failure.
    #[error(transparent)]
    Json(#[from] serde_json::Error),

    /// Underlying CSV (de)serialization failure.
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, QrbnbError>;
