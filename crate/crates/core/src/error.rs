//! Crate-wide error type.

use crate::rational::Rational;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Public and private beliefs are contradictorily conclusive (1 vs 0).
    /// Raised only at zero-probability decision points; the equilibrium
    /// engine resolves those with its off-path rule instead of updating.
    #[error("indeterminate posterior: public belief {public} against private belief {private}")]
    IndeterminatePosterior {
        public: Box<Rational>,
        private: Box<Rational>,
    },

    #[error("resource limit exceeded: {what} would exceed cap {cap}")]
    ResourceLimit { what: &'static str, cap: usize },

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("parameter violation: {0}")]
    ParameterViolation(String),

    #[error("profile incomplete: missing decision at node [{node}] for signal {signal:?}")]
    ProfileIncomplete { node: String, signal: String },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// Two independent deciders disagreed; indicates an implementation bug.
    #[error("internal disagreement: {0}")]
    InternalDisagreement(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),
}

impl Error {
    /// Stable machine-readable code, used by the CLI for one-line errors.
    pub fn code(&self) -> &'static str {
        match self {
            Error::IndeterminatePosterior { .. } => "INDETERMINATE_POSTERIOR",
            Error::ResourceLimit { .. } => "RESOURCE_LIMIT",
            Error::PreconditionViolated(_) => "PRECONDITION_VIOLATED",
            Error::HypothesisViolated(_) => "HYPOTHESIS_VIOLATED",
            Error::ParameterViolation(_) => "PARAMETER_VIOLATION",
            Error::ProfileIncomplete { .. } => "PROFILE_INCOMPLETE",
            Error::ShapeMismatch(_) => "SHAPE_MISMATCH",
            Error::InternalDisagreement(_) => "INTERNAL_DISAGREEMENT",
            Error::Parse(_) => "PARSE_ERROR",
            Error::InvalidInstance(_) => "INVALID_INSTANCE",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
