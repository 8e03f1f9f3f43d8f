use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("{0} is not positive definite")]
    NotPositiveDefinite(String),
    /// Stacked `F` / `G` are rank deficient, so the bounding family is singular.
    #[error("rank condition violated: {0}")]
    AssumptionViolation(String),
    /// A family member fell below the eigenvalue floor during optimization.
    #[error("degenerate bounding family: {0}")]
    Degenerate(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
