use thiserror::Error;

/// Errors raised by operator evaluation and the supporting primitives.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The (p,q) pair is outside the regime an operation supports.
    #[error("regime error: {0}")]
    Regime(String),

    /// A series failed to reach its tolerance within the term cap.
    #[error("series did not converge after {terms} terms (tail bound {tail:e}, target {target:e})")]
    Convergence { terms: usize, tail: f64, target: f64 },

    /// Exact-rational verification refused an instance above the size cap.
    #[error("exact arithmetic supports n+m <= {cap}, got {got}")]
    ExactSizeCap { cap: usize, got: usize },

    /// Malformed user input (function specs, sequence tables, rationals).
    #[error("invalid input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
