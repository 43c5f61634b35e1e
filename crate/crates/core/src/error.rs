use thiserror::Error;

/// Errors shared across the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// A word mentions a generator index outside the rank of the structure
    /// it was handed to.
    #[error("rank mismatch: generator a{found} used, but rank is {rank}")]
    RankMismatch { rank: usize, found: usize },

    /// Flow operands were built over different oracles.
    #[error("oracle mismatch between flow operands")]
    OracleMismatch,

    /// Exact integer arithmetic would overflow; counts are never wrapped.
    #[error("integer overflow in {context}")]
    Overflow { context: &'static str },

    /// An argument is outside the documented domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A search or enumeration hit its memory budget.
    #[error("memory budget exceeded at depth {depth_reached}")]
    BudgetExceeded { depth_reached: u32 },

    /// Generator images do not form permutations of the stated degree.
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    /// Malformed key=value configuration.
    #[error("config error: {0}")]
    Config(String),

    /// Malformed word text.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
