use thiserror::Error;

use crate::model::{PossibilisticViolation, SignallingViolation};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("model is signalling ({} violation(s))", .0.len())]
    Signalling(Vec<SignallingViolation>),

    #[error("support is not restriction-consistent ({} violation(s))", .0.len())]
    PossibilisticSignalling(Vec<PossibilisticViolation>),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A witness or certificate failed its independent re-check.
    #[error("internal verification failure: {0}")]
    Verification(String),
}
