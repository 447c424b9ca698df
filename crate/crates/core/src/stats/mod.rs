//! Correlation, the Mantel permutation test and dummy-coded least squares.

mod correlation;
mod mantel;
mod ols;

use thiserror::Error;

pub use correlation::{average_ranks, pearson, spearman, CorrelationMethod};
pub use mantel::{mantel, Alternative, MantelConfig, MantelResult};
pub use ols::{dummy_code, ols_fit, DesignMatrix, OlsFit, Predictor};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("series lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("need at least {min} observations, got {got}")]
    TooShort { min: usize, got: usize },
    #[error("series has zero variance")]
    ZeroVariance,
    #[error("matrices cover different item counts: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },
    #[error("permuted correlations have zero spread; z-score undefined")]
    DegeneratePermutations,
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("factor {factor:?}: level {level:?} is not present in any row")]
    UnknownLevel { factor: String, level: String },
    #[error("row {row} has {got} factor values, expected {expected}")]
    RowArity { row: usize, got: usize, expected: usize },
    #[error("design needs more rows ({rows}) than columns ({cols})")]
    Underdetermined { rows: usize, cols: usize },
    #[error("design matrix is rank deficient")]
    RankDeficient,
}
