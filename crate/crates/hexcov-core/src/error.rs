use alloc::string::String;
use core::fmt;

/// Errors surfaced by the model and estimators.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A model parameter violates its precondition. `key` names the
    /// offending configuration field.
    Parameter { key: &'static str, message: String },
    /// A quantity was evaluated outside its mathematical domain.
    Domain(String),
    /// A sampled network realization cannot be completed (e.g. the
    /// mobile-placement rejection budget ran out) and the trial must be
    /// discarded.
    RealizationRejected(String),
    /// A realization is degenerate (e.g. no base stations in the window).
    DegenerateRealization(String),
    /// An estimator finished with no accepted trials.
    NoAcceptedTrials,
    /// Numerical quadrature failed to converge to the requested tolerance.
    Quadrature(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Parameter { key, message } => write!(f, "invalid parameter `{key}`: {message}"),
            Error::Domain(m) => write!(f, "domain error: {m}"),
            Error::RealizationRejected(m) => write!(f, "realization rejected: {m}"),
            Error::DegenerateRealization(m) => write!(f, "degenerate realization: {m}"),
            Error::NoAcceptedTrials => write!(f, "no accepted trials"),
            Error::Quadrature(m) => write!(f, "quadrature failed: {m}"),
        }
    }
}

impl core::error::Error for Error {}
