use super::delta::{check_compatible, delta_of};
use super::{AggregationError, MeasureFamily, Partition};
use crate::markov::{Kernel, SparseMatrix};

/// A chain over the blocks of a partition together with the data it was
/// built from.
#[derive(Clone, Debug, PartialEq)]
pub struct AggregatedChain<K> {
    pub partition: Partition,
    pub measures: MeasureFamily,
    pub matrix: K,
    /// Largest spread of `δ` over a target block.
    pub residual: f64,
}

/// Builds `K̃(A_i, A_j) = δ(A_i, s)`, `s ∈ A_j`.
///
/// Every `s ∈ A_j` gives the same value when the condition holds; the entry
/// is taken as the `α_j`-weighted mean over `A_j`, which keeps row sums exact
/// when `δ` varies within the tolerance.
pub fn aggregate<K: Kernel>(
    k: &K,
    part: &Partition,
    alphas: &MeasureFamily,
    tol: f64,
) -> Result<AggregatedChain<K>, AggregationError> {
    check_compatible(k.dim(), part, alphas)?;
    let table = delta_of(k.matrix(), part, alphas);
    let residual = table.max_spread();
    if !(residual <= tol) {
        return Err(AggregationError::ConditionViolated { residual, tol });
    }
    let triplets = (0..part.len()).flat_map(|j| {
        table
            .stats(j)
            .iter()
            .map(move |st| (st.source, j, st.weighted_mean))
            .collect::<Vec<_>>()
    });
    let matrix = K::from_matrix(SparseMatrix::from_triplets(part.len(), triplets)?)?;
    Ok(AggregatedChain {
        partition: part.clone(),
        measures: alphas.clone(),
        matrix,
        residual,
    })
}
