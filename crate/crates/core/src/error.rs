use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid group specification: {0}")]
    InvalidGroup(String),
    #[error("element {element} does not belong to {family} group")]
    ElementMismatch { element: String, family: &'static str },
    #[error("cannot parse element {0:?}")]
    InvalidElement(String),
    #[error("invalid rational {0:?}")]
    InvalidRational(String),
    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },
    #[error("functional has coefficient sum {0}, not zero; it does not descend to the quotient by constants")]
    NotZeroSum(String),
    #[error("{0}")]
    InvalidChain(String),
    #[error("{0}")]
    InvalidInput(String),
    #[error("search space too large: {0}")]
    TooLarge(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
