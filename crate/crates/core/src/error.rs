use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("instance is empty")]
    EmptyInstance,

    #[error("bin type catalog exceeds the cap of {cap} types (stopped after {partial})")]
    CatalogOverflow { partial: usize, cap: usize },

    #[error("no non-wasteful ordering exists for the given multiset")]
    NoOrdering,

    #[error("exact search exceeded its budget of {budget} states; use an analytic or bound oracle")]
    BudgetExceeded { budget: usize },

    #[error("size set denominators are too large for exact integer levels")]
    ScaleOverflow,

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
