use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("inadmissible parameters: {0}")]
    InvalidParams(String),

    #[error("invalid sample: {0}")]
    InvalidSample(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parameters are not strictly stable: {0}")]
    NotStrictlyStable(String),

    /// A numerical routine could not reach its certified accuracy.
    #[error("numerical accuracy degraded: {0}")]
    Accuracy(String),
}

impl Error {
    /// True for errors caused by caller input rather than numerics.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::Accuracy(_))
    }
}
