use super::{
    aggregate, restrict, AggregatedChain, AggregationError, MeasureFamily, Partition, DEFAULT_CONDITION_TOL,
    EMPTY_BLOCK_EPS,
};
use crate::markov::{
    classify, transient, uniformize, ChainStructure, Distribution, Kernel, RateMatrix, SparseMatrix, StochasticMatrix,
};
use crate::par;

/// Poisson truncation tolerance used for both chains in
/// [`convergence_diagnostics`].
pub const DIAGNOSTIC_TRANSIENT_TOL: f64 = 1e-14;

/// `‖agg(I + Q/r) − (I + agg(Q)/r)‖∞`: aggregating the uniformized chain and
/// uniformizing the aggregated generator should agree.
pub fn verify_commutation(
    q: &RateMatrix,
    part: &Partition,
    alphas: &MeasureFamily,
    r: f64,
) -> Result<f64, AggregationError> {
    let m = uniformize(q, r)?;
    let lhs = aggregate(&m, part, alphas, DEFAULT_CONDITION_TOL)?;
    let q_agg = aggregate(q, part, alphas, DEFAULT_CONDITION_TOL)?;
    let n = part.len();
    let rhs = SparseMatrix::from_triplets(
        n,
        q_agg
            .matrix
            .matrix()
            .triplets()
            .map(|(i, j, v)| (i, j, v / r))
            .chain((0..n).map(|i| (i, i, 1.0))),
    )?;
    Ok(lhs.matrix.matrix().max_abs_diff(&rhs))
}

/// Largest `|P̃ⁿ(i, j) − Σ_{s' ∈ A_i} α_i(s') Pⁿ(s', s) / α_j(s)|` over all
/// block pairs and `s ∈ A_j`.
pub fn power_identity_residual(
    p: &StochasticMatrix,
    part: &Partition,
    alphas: &MeasureFamily,
    n: usize,
) -> Result<f64, AggregationError> {
    let agg = aggregate(p, part, alphas, DEFAULT_CONDITION_TOL)?;
    let m = part.len();
    let per_block = par::map_range(m, |i| {
        let mut fine = vec![0.0; p.dim()];
        for &s in part.block(i) {
            fine[s] = alphas.alpha(s);
        }
        let mut coarse = vec![0.0; m];
        coarse[i] = 1.0;
        for _ in 0..n {
            fine = p.matrix().left_mul(&fine);
            coarse = agg.matrix.matrix().left_mul(&coarse);
        }
        (0..p.dim())
            .map(|s| (coarse[part.block_of(s)] - fine[s] / alphas.alpha(s)).abs())
            .fold(0.0, f64::max)
    });
    Ok(per_block.into_iter().fold(0.0, f64::max))
}

#[derive(Clone, Debug, PartialEq)]
pub struct StructureReport {
    pub original: ChainStructure,
    pub aggregated: ChainStructure,
}

/// Classifies both chains and checks that irreducibility and aperiodicity
/// carry over to the blocks. A failure means the aggregated chain was not
/// built from `k`.
pub fn structural_preservation<K: Kernel>(
    k: &K,
    agg: &AggregatedChain<K>,
) -> Result<StructureReport, AggregationError> {
    let original = classify(k);
    let aggregated = classify(&agg.matrix);
    let part = &agg.partition;
    if original.irreducible && !aggregated.irreducible {
        return Err(AggregationError::StructureLost {
            block: 0,
            what: "irreducible chain aggregated to a reducible one".into(),
        });
    }
    for s in 0..k.dim() {
        if original.periods[original.class_of[s]] != Some(1) {
            continue;
        }
        let b = part.block_of(s);
        if aggregated.periods[aggregated.class_of[b]] != Some(1) {
            return Err(AggregationError::StructureLost {
                block: b,
                what: format!("state {s} is aperiodic but its block is not"),
            });
        }
    }
    Ok(StructureReport { original, aggregated })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiagnosticPoint {
    pub t: f64,
    /// `max_i |P(Y_t = A_i) − P(X_t ∈ A_i)|`.
    pub dev_lump: f64,
    /// `max_s |P(X_t = s) − P(Y_t = block(s)) α(s)|` over blocks of
    /// non-negligible probability.
    pub dev_inv: f64,
}

/// Evolves `X` under `q` from `pi0` and `Y` under the aggregated generator
/// from the block masses of `pi0`, and compares them at each time.
pub fn convergence_diagnostics(
    q: &RateMatrix,
    part: &Partition,
    alphas: &MeasureFamily,
    pi0: &Distribution,
    times: &[f64],
) -> Result<Vec<DiagnosticPoint>, AggregationError> {
    let agg = aggregate(q, part, alphas, DEFAULT_CONDITION_TOL)?;
    diagnostics_for(q, &agg, pi0, times)
}

/// As [`convergence_diagnostics`] with an already aggregated generator.
pub fn diagnostics_for(
    q: &RateMatrix,
    agg: &AggregatedChain<RateMatrix>,
    pi0: &Distribution,
    times: &[f64],
) -> Result<Vec<DiagnosticPoint>, AggregationError> {
    let part = &agg.partition;
    let y0 = restrict(pi0, part)?;
    par::map_slice(times, |&t| {
        let x = transient(q, pi0, t, DIAGNOSTIC_TRANSIENT_TOL)?;
        let y = transient(&agg.matrix, &y0, t, DIAGNOSTIC_TRANSIENT_TOL)?;
        let x_blocks = restrict(&x, part)?;
        let dev_lump = (0..part.len()).map(|i| (y[i] - x_blocks[i]).abs()).fold(0.0, f64::max);
        let dev_inv = (0..q.dim())
            .filter(|&s| y[part.block_of(s)] > EMPTY_BLOCK_EPS)
            .map(|s| (x[s] - y[part.block_of(s)] * agg.measures.alpha(s)).abs())
            .fold(0.0, f64::max);
        Ok(DiagnosticPoint { t, dev_lump, dev_inv })
    })
    .into_iter()
    .collect()
}
