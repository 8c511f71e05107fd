use thiserror::Error;

/// Errors raised by metric evaluation, scenario generation and document handling.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input violates a domain invariant (bad probability, malformed matrix, ...).
    #[error("invalid {what}: {reason}")]
    Invalid { what: &'static str, reason: String },

    #[error("state dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("time step {step} is outside the window 1..={window}")]
    OutsideWindow { step: usize, window: usize },

    #[error("window lengths differ: {left} vs {right}")]
    WindowMismatch { left: usize, right: usize },

    /// The exact solver would have to enumerate too many assignment vectors.
    #[error(
        "exact solver needs {required} {resource}, above the limit of {limit}; use the LP solver instead"
    )]
    Capacity {
        resource: &'static str,
        required: u128,
        limit: u128,
    },

    #[error("LP solver failed: {0}")]
    Solver(String),
}

impl Error {
    pub(crate) fn invalid(what: &'static str, reason: impl Into<String>) -> Self {
        Error::Invalid {
            what,
            reason: reason.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
