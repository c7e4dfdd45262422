//! Finite discrete- and continuous-time Markov chains.
//!
//! Matrices are stored sparsely, row-major with a column-major mirror for
//! incoming-transition scans. Distributions are dense.

mod analysis;
mod distribution;
mod linalg;
mod matrix;
mod space;
mod transient;

pub use analysis::{classify, stationary, ChainStructure};
pub use distribution::Distribution;
pub use matrix::{ChainKind, Kernel, RateMatrix, SparseMatrix, StochasticMatrix};
pub use space::StateSpace;
pub use transient::{
    cesaro, default_uniformization_rate, evolve_discrete, poisson_weights, transient, transient_many,
    transient_with_rate, uniformize, DEFAULT_SLACK, MAX_POISSON_TERMS,
};

use thiserror::Error;

/// Tolerance on row sums of stochastic and rate matrices, relative to the
/// absolute mass in the row (never below this absolute value).
pub const ROW_SUM_TOL: f64 = 1e-12;

/// Tolerance on the total mass of a distribution.
pub const MASS_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MarkovError {
    #[error("duplicate state key `{0}`")]
    DuplicateState(String),
    #[error("entry ({row}, {col}) lies outside a {dim}x{dim} matrix")]
    OutOfBounds { row: usize, col: usize, dim: usize },
    #[error("entry ({row}, {col}) = {value} is not finite")]
    NonFinite { row: usize, col: usize, value: f64 },
    #[error("entry ({row}, {col}) = {value} is negative")]
    NegativeEntry { row: usize, col: usize, value: f64 },
    #[error("row {row} sums to {sum}, expected {expected}")]
    RowSum { row: usize, sum: f64, expected: f64 },
    #[error("matrix dimension must be positive")]
    EmptyMatrix,
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("chain is not irreducible: {closed_classes} closed communicating classes")]
    NotIrreducible { closed_classes: usize },
    #[error("linear solve failed: {0}")]
    SolverFailure(String),
    #[error("uniformization rate {rate} must exceed the maximal exit rate {max_exit}")]
    RateBoundViolated { rate: f64, max_exit: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
