use std::fmt;

use thiserror::Error;

/// A refused computation: which cap, how big the request was and how to raise it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResourceError {
    pub cap: &'static str,
    pub limit: String,
    pub requested: String,
    pub flag: &'static str,
}

impl fmt::Display for ResourceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} exceeded: requested {} but the cap is {} (raise it with {})",
            self.cap, self.requested, self.limit, self.flag
        )
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("point {point} out of range for degree {degree}")]
    PointOutOfRange { point: usize, degree: usize },

    #[error("not a subgroup: {0}")]
    NotSubgroup(String),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid input: {0}")]
    Input(String),

    #[error("{0}")]
    Resource(ResourceError),
}

impl From<ResourceError> for Error {
    fn from(e: ResourceError) -> Self {
        Error::Resource(e)
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
