use super::{AggregationError, MeasureFamily, Partition};
use crate::markov::{Kernel, MarkovError, SparseMatrix};
use crate::par;

/// Per-(source block, target block) summary of `δ(A_i, s)` over `s ∈ A_j`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlockStat {
    pub source: usize,
    pub min: f64,
    pub max: f64,
    /// `Σ_{s ∈ A_j} α_j(s) δ(A_i, s)`.
    pub weighted_mean: f64,
}

impl BlockStat {
    pub fn spread(&self) -> f64 {
        self.max - self.min
    }
}

/// `δ(A_i, s)` for every source block `i` and target state `s`.
///
/// Stored sparsely: a source block that sends no mass to `s` has value 0 and
/// no entry.
#[derive(Clone, Debug, PartialEq)]
pub struct DeltaTable {
    values: Vec<Vec<(usize, f64)>>,
    stats: Vec<Vec<BlockStat>>,
}

impl DeltaTable {
    /// `δ(A_i, s)`.
    pub fn value(&self, i: usize, s: usize) -> f64 {
        let col = &self.values[s];
        match col.binary_search_by_key(&i, |&(b, _)| b) {
            Ok(k) => col[k].1,
            Err(_) => 0.0,
        }
    }

    /// Nonzero `(source block, δ)` pairs for target state `s`, by block.
    pub fn column(&self, s: usize) -> &[(usize, f64)] {
        &self.values[s]
    }

    /// Nonzero block statistics for target block `j`, by source block.
    pub fn stats(&self, j: usize) -> &[BlockStat] {
        &self.stats[j]
    }

    /// Max minus min of `δ(A_i, s)` over `s ∈ A_j`.
    pub fn spread(&self, i: usize, j: usize) -> f64 {
        self.stat(i, j).map_or(0.0, |st| st.spread())
    }

    pub fn weighted_mean(&self, i: usize, j: usize) -> f64 {
        self.stat(i, j).map_or(0.0, |st| st.weighted_mean)
    }

    pub fn max_spread(&self) -> f64 {
        self.stats.iter().flatten().map(BlockStat::spread).fold(0.0, f64::max)
    }

    fn stat(&self, i: usize, j: usize) -> Option<&BlockStat> {
        let row = &self.stats[j];
        row.binary_search_by_key(&i, |st| st.source).ok().map(|k| &row[k])
    }
}

pub(crate) fn check_compatible(dim: usize, part: &Partition, alphas: &MeasureFamily) -> Result<(), AggregationError> {
    if part.n_states() != dim {
        return Err(MarkovError::DimensionMismatch {
            expected: dim,
            found: part.n_states(),
        }
        .into());
    }
    if alphas.partition() != part {
        return Err(AggregationError::InvalidMeasures(
            "measure family was built for a different partition".into(),
        ));
    }
    Ok(())
}

/// Evaluates `δ(A_i, s) = Σ_{s' ∈ A_i} α_i(s') K(s', s) / α_{block(s)}(s)`.
/// Columns are computed independently (in parallel when enabled); block
/// statistics are reduced in ascending state order.
pub fn delta_table<K: Kernel>(k: &K, part: &Partition, alphas: &MeasureFamily) -> Result<DeltaTable, AggregationError> {
    check_compatible(k.dim(), part, alphas)?;
    Ok(delta_of(k.matrix(), part, alphas))
}

pub(crate) fn delta_of(m: &SparseMatrix, part: &Partition, alphas: &MeasureFamily) -> DeltaTable {
    let values = par::map_range(m.dim(), |s| {
        let mut acc: Vec<(usize, f64)> = m
            .col(s)
            .iter()
            .map(|&(src, x)| (part.block_of(src), alphas.alpha(src) * x))
            .collect();
        acc.sort_by_key(|&(b, _)| b);
        let inv = 1.0 / alphas.alpha(s);
        let mut out: Vec<(usize, f64)> = Vec::with_capacity(acc.len());
        for (b, x) in acc {
            match out.last_mut() {
                Some((last, sum)) if *last == b => *sum += x,
                _ => out.push((b, x)),
            }
        }
        for entry in &mut out {
            entry.1 *= inv;
        }
        out.retain(|&(_, v)| v != 0.0);
        out
    });
    let stats = part
        .blocks()
        .iter()
        .map(|members| block_stats(members, &values, alphas))
        .collect();
    DeltaTable { values, stats }
}

fn block_stats(members: &[usize], values: &[Vec<(usize, f64)>], alphas: &MeasureFamily) -> Vec<BlockStat> {
    // each stat is paired with the number of members that have an entry
    let mut acc: Vec<(BlockStat, usize)> = Vec::new();
    for &s in members {
        let a = alphas.alpha(s);
        for &(i, v) in &values[s] {
            let pos = match acc.binary_search_by_key(&i, |(st, _)| st.source) {
                Ok(p) => p,
                Err(p) => {
                    let st = BlockStat {
                        source: i,
                        min: f64::INFINITY,
                        max: f64::NEG_INFINITY,
                        weighted_mean: 0.0,
                    };
                    acc.insert(p, (st, 0));
                    p
                }
            };
            let (st, seen) = &mut acc[pos];
            st.min = st.min.min(v);
            st.max = st.max.max(v);
            st.weighted_mean += a * v;
            *seen += 1;
        }
    }
    acc.into_iter()
        .map(|(mut st, seen)| {
            if seen < members.len() {
                st.min = st.min.min(0.0);
                st.max = st.max.max(0.0);
            }
            st
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConditionReport {
    pub holds: bool,
    /// Largest spread of `δ(A_i, ·)` over a target block.
    pub residual: f64,
}

/// The backward lumping condition: `δ(A_i, s)` does not depend on the choice
/// of `s` within a block.
pub fn check_condition<K: Kernel>(
    k: &K,
    part: &Partition,
    alphas: &MeasureFamily,
    tol: f64,
) -> Result<ConditionReport, AggregationError> {
    let residual = delta_table(k, part, alphas)?.max_spread();
    Ok(ConditionReport {
        holds: residual <= tol,
        residual,
    })
}

/// Exact permutation criterion: for every block pair `(i, j)` the multiset of
/// incoming entries `{K(s₁, s) : s₁ ∈ A_i}` is the same for all `s ∈ A_j`.
/// Stored values are compared bit for bit; absent entries count as zeros.
pub fn check_cond3<K: Kernel>(k: &K, part: &Partition) -> bool {
    let m = k.matrix();
    if part.n_states() != m.dim() {
        return false;
    }
    let signatures = par::map_range(m.dim(), |s| {
        let mut sig: Vec<(usize, u64)> = m
            .col(s)
            .iter()
            .map(|&(src, x)| (part.block_of(src), x.to_bits()))
            .collect();
        sig.sort_by(|a, b| a.0.cmp(&b.0).then(f64::from_bits(a.1).total_cmp(&f64::from_bits(b.1))));
        sig
    });
    part.blocks().iter().all(|members| {
        let first = &signatures[members[0]];
        members[1..].iter().all(|&s| &signatures[s] == first)
    })
}
