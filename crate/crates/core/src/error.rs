use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("accuracy error: certified bound {bound:e} exceeds tolerance {tol:e} after refinement")]
    Accuracy { bound: f64, tol: f64 },

    #[error("resolution error: {0}")]
    Resolution(String),

    #[error("infeasible: {0}")]
    Infeasible(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
