//! Lumping a chain onto a partition of its state space.
//!
//! Given blocks `A_1..A_m` and a probability measure `α_i` on each block, the
//! backward quantity
//!
//! ```text
//! δ(A_i, s) = Σ_{s' ∈ A_i} α_i(s') K(s', s) / α_j(s),   s ∈ A_j
//! ```
//!
//! must be constant over every target block `A_j`. When it is, the block
//! matrix `K̃(A_i, A_j) = δ(A_i, s)` is again stochastic (or a generator), the
//! block process started from a distribution that respects `{α_i}` is the
//! image of the original process, and the original distribution is recovered
//! as `P(X = s) = P(Y = block(s)) · α(s)`.

mod aggregate;
mod delta;
mod diagnostics;
mod partition;

pub use aggregate::{aggregate, AggregatedChain};
pub use delta::{check_cond3, check_condition, delta_table, BlockStat, ConditionReport, DeltaTable};
pub use diagnostics::{
    convergence_diagnostics, diagnostics_for, power_identity_residual, structural_preservation, verify_commutation,
    DiagnosticPoint, StructureReport, DIAGNOSTIC_TRANSIENT_TOL,
};
pub use partition::{
    lift, nested, refines, respects, restrict, uniform_measures, MeasureFamily, NestedAggregation, Partition,
    RespectReport,
};

use thiserror::Error;

use crate::markov::MarkovError;

/// Default tolerance on the backward-condition residual.
pub const DEFAULT_CONDITION_TOL: f64 = 1e-9;

/// Tolerance used by [`respects`] to decide `holds`.
pub const RESPECT_TOL: f64 = 1e-12;

/// Probability below which a block is skipped in de-aggregation deviations.
pub const EMPTY_BLOCK_EPS: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AggregationError {
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("invalid measure family: {0}")]
    InvalidMeasures(String),
    #[error("backward condition violated: residual {residual:e} exceeds tolerance {tol:e}")]
    ConditionViolated { residual: f64, tol: f64 },
    #[error("fine block {block} straddles several coarse blocks")]
    NotNested { block: usize },
    #[error("structural property lost in block {block}: {what}")]
    StructureLost { block: usize, what: String },
    #[error(transparent)]
    Markov(#[from] MarkovError),
}
