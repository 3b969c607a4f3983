use thiserror::Error;

/// Errors produced by the clustering library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("item index {item} is outside a universe of {n} items")]
    UniverseMismatch { item: usize, n: usize },

    #[error("universe sizes differ: {left} vs {right}")]
    UniverseSizeMismatch { left: usize, right: usize },

    #[error("triplet items must be pairwise distinct, got ({0}, {1}, {2})")]
    DegenerateTriplet(usize, usize, usize),

    #[error("a pair needs two distinct items, got {0} twice")]
    InvalidPair(usize),

    #[error("cluster labels must be positive integers, item {item} has label 0")]
    ZeroLabel { item: usize },

    #[error("vertex set is not a cover: edge ({0}, {1}) is uncovered")]
    InvalidCover(usize, usize),

    #[error("triplets are inconsistent on pair ({u}, {v})")]
    Inconsistent { u: usize, v: usize },

    #[error("{what} of size {size} exceeds the exhaustive-search limit {limit}")]
    SizeLimit {
        what: &'static str,
        size: usize,
        limit: usize,
    },

    #[error("edge ({u}, {v}) has weight {weight}; only unit weights are supported")]
    UnsupportedWeights { u: usize, v: usize, weight: u64 },

    #[error("invalid edge ({u}, {v}): {reason}")]
    InvalidEdge {
        u: usize,
        v: usize,
        reason: &'static str,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
