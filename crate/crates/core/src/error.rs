use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter violates a type invariant. `key` names the offending field.
    #[error("invalid {key}: {reason}")]
    InvalidParameter { key: &'static str, reason: String },

    #[error("degenerate constraint: {0}")]
    DegenerateConstraint(&'static str),

    #[error("Bob channel lies in Eve constraint space")]
    BobInEveConstraint,

    #[error("Eve channel lies in Bob constraint space")]
    EveInBobConstraint,

    #[error("power iteration did not converge after {0} iterations")]
    NoConvergence(usize),

    #[error("malformed allocation list: {0}")]
    AllocationParse(String),
}

impl Error {
    pub(crate) fn invalid(key: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            key,
            reason: reason.into(),
        }
    }

    /// True for errors caused by coincident or aligned users rather than bad input.
    pub fn is_degenerate(&self) -> bool {
        matches!(
            self,
            Error::DegenerateConstraint(_)
                | Error::BobInEveConstraint
                | Error::EveInBobConstraint
                | Error::NoConvergence(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
