use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("{what} exceeds the resource cap ({limit})")]
    CapExceeded { what: String, limit: String },
    #[error("operation undefined for the zero polynomial")]
    ZeroPolynomial,
    #[error("modulus is not irreducible")]
    NotIrreducible,
    #[error("the zero section defines no curve")]
    ZeroSection,
    #[error("section space of bidegree ({0}, {1}) is empty")]
    EmptyBasis(i64, i64),
    #[error("linear system is inconsistent")]
    Inconsistent,
    #[error("no stable rank found up to d = {max_d}; ranks so far: {ranks:?}")]
    NotStabilized { max_d: i64, ranks: Vec<usize> },
    #[error("malformed input: {0}")]
    Malformed(String),
}

impl Error {
    pub(crate) fn cap(what: impl Into<String>, limit: impl std::fmt::Display) -> Self {
        Error::CapExceeded {
            what: what.into(),
            limit: limit.to_string(),
        }
    }

    /// True for resource-cap failures (the CLI maps these to exit code 2).
    pub fn is_cap(&self) -> bool {
        matches!(self, Error::CapExceeded { .. } | Error::NotStabilized { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
