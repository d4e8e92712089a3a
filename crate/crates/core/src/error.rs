//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("sparsity level s={s} out of range for p={p}")]
    SparsityOutOfRange { s: usize, p: usize },

    #[error("enumeration budget exceeded: C({p},{s}) = {count} supports > budget {budget}; use sampled audit")]
    BudgetExceeded {
        p: usize,
        s: usize,
        count: u128,
        budget: u64,
    },

    #[error("singular Gram block on support {0:?}; design is degenerate at this sparsity")]
    SingularGramBlock(Vec<usize>),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
