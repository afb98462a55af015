use thiserror::Error;

/// Errors reported by the engines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("{what} budget exceeded: requested {requested}, limit {limit}")]
    Budget {
        what: &'static str,
        requested: u128,
        limit: u128,
    },

    #[error("argument out of range: {0}")]
    OutOfRange(String),

    #[error("precision not reachable: {0}")]
    Precision(String),

    #[error("{0} is not below the long cycle in the absolute order")]
    NotBelowCycle(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn budget(what: &'static str, requested: u128, limit: u128) -> Result<()> {
    if requested > limit {
        Err(Error::Budget {
            what,
            requested,
            limit,
        })
    } else {
        Ok(())
    }
}
