use thiserror::Error;

/// Errors raised by every module of the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DynError {
    #[error("dimension mismatch: {left} vs {right}")]
    Dimension { left: usize, right: usize },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("contract violated: {0}")]
    Contract(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("exploration cap of {cap} exceeded while {during}")]
    Resource { cap: usize, during: String },
    #[error("cannot desynchronize: every prime factor of the walk is the same prime walk")]
    CannotDesynchronize,
    #[error("critical itinerary: iterate {iterate} lands on breakpoint {point}")]
    CriticalItinerary { iterate: usize, point: String },
    #[error("invariant violated (bug): {0}")]
    Invariant(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl DynError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        DynError::Domain(msg.into())
    }

    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        DynError::Contract(msg.into())
    }

    pub(crate) fn invariant(msg: impl Into<String>) -> Self {
        DynError::Invariant(msg.into())
    }

    pub(crate) fn resource(cap: usize, during: impl Into<String>) -> Self {
        DynError::Resource {
            cap,
            during: during.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, DynError>;
