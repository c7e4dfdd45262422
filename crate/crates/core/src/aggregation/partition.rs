use super::{AggregationError, RESPECT_TOL};
use crate::markov::{Distribution, MarkovError};

/// Partition of `0..n` into nonempty disjoint blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    blocks: Vec<Vec<usize>>,
    block_of: Vec<usize>,
}

impl Partition {
    /// Members of each block are sorted; block order is kept.
    pub fn new(n_states: usize, mut blocks: Vec<Vec<usize>>) -> Result<Self, AggregationError> {
        let mut block_of = vec![usize::MAX; n_states];
        for (b, members) in blocks.iter_mut().enumerate() {
            if members.is_empty() {
                return Err(AggregationError::InvalidPartition(format!("block {b} is empty")));
            }
            members.sort_unstable();
            for &s in members.iter() {
                if s >= n_states {
                    return Err(AggregationError::InvalidPartition(format!(
                        "state {s} outside 0..{n_states}"
                    )));
                }
                if block_of[s] != usize::MAX {
                    return Err(AggregationError::InvalidPartition(format!(
                        "state {s} appears in blocks {} and {b}",
                        block_of[s]
                    )));
                }
                block_of[s] = b;
            }
        }
        if let Some(s) = block_of.iter().position(|&b| b == usize::MAX) {
            return Err(AggregationError::InvalidPartition(format!("state {s} is not covered")));
        }
        Ok(Self { blocks, block_of })
    }

    pub fn singletons(n_states: usize) -> Self {
        Self {
            blocks: (0..n_states).map(|s| vec![s]).collect(),
            block_of: (0..n_states).collect(),
        }
    }

    pub fn whole(n_states: usize) -> Self {
        Self {
            blocks: vec![(0..n_states).collect()],
            block_of: vec![0; n_states],
        }
    }

    /// Fibers of a labelling, blocks ordered by label. Returns the distinct
    /// labels in block order alongside the partition.
    pub fn from_labels<T: Ord + Clone>(labels: &[T]) -> (Self, Vec<T>) {
        let mut distinct: Vec<T> = labels.to_vec();
        distinct.sort();
        distinct.dedup();
        let mut blocks = vec![Vec::new(); distinct.len()];
        let mut block_of = Vec::with_capacity(labels.len());
        for (s, l) in labels.iter().enumerate() {
            let b = distinct.binary_search(l).expect("label present");
            blocks[b].push(s);
            block_of.push(b);
        }
        (Self { blocks, block_of }, distinct)
    }

    pub fn n_states(&self) -> usize {
        self.block_of.len()
    }

    /// Number of blocks.
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block(&self, i: usize) -> &[usize] {
        &self.blocks[i]
    }

    pub fn block_of(&self, s: usize) -> usize {
        self.block_of[s]
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(Vec::len).collect()
    }

    fn compatible(&self, n: usize) -> Result<(), AggregationError> {
        if self.n_states() != n {
            return Err(MarkovError::DimensionMismatch {
                expected: self.n_states(),
                found: n,
            }
            .into());
        }
        Ok(())
    }
}

/// One probability measure per block, each supported on its own block.
///
/// Stored as the per-state weight `α_{block(s)}(s)` together with the
/// partition it refers to.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasureFamily {
    partition: Partition,
    weight: Vec<f64>,
}

impl MeasureFamily {
    /// `weight[s]` is the mass of state `s` within its own block.
    pub fn new(partition: &Partition, weight: Vec<f64>) -> Result<Self, AggregationError> {
        if weight.len() != partition.n_states() {
            return Err(AggregationError::InvalidMeasures(format!(
                "{} weights for {} states",
                weight.len(),
                partition.n_states()
            )));
        }
        if let Some(s) = weight.iter().position(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(AggregationError::InvalidMeasures(format!(
                "weight of state {s} is {}; block measures must be strictly positive",
                weight[s]
            )));
        }
        for (b, members) in partition.blocks().iter().enumerate() {
            let total: f64 = members.iter().map(|&s| weight[s]).sum();
            if (total - 1.0).abs() > 1e-12 {
                return Err(AggregationError::InvalidMeasures(format!(
                    "block {b} has total mass {total}"
                )));
            }
        }
        Ok(Self {
            partition: partition.clone(),
            weight,
        })
    }

    /// Weights listed per block, in the partition's member order.
    pub fn from_block_weights(partition: &Partition, per_block: &[Vec<f64>]) -> Result<Self, AggregationError> {
        if per_block.len() != partition.len() {
            return Err(AggregationError::InvalidMeasures(format!(
                "{} measures for {} blocks",
                per_block.len(),
                partition.len()
            )));
        }
        let mut weight = vec![0.0; partition.n_states()];
        for (b, (members, ws)) in partition.blocks().iter().zip(per_block).enumerate() {
            if members.len() != ws.len() {
                return Err(AggregationError::InvalidMeasures(format!(
                    "block {b} has {} members but {} weights",
                    members.len(),
                    ws.len()
                )));
            }
            for (&s, &w) in members.iter().zip(ws) {
                weight[s] = w;
            }
        }
        Self::new(partition, weight)
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    /// `α_{block(s)}(s)`.
    pub fn alpha(&self, s: usize) -> f64 {
        self.weight[s]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weight
    }
}

/// `α_i(s) = 1 / |A_i|`.
pub fn uniform_measures(part: &Partition) -> MeasureFamily {
    let mut weight = vec![0.0; part.n_states()];
    for members in part.blocks() {
        let w = 1.0 / members.len() as f64;
        for &s in members {
            weight[s] = w;
        }
    }
    MeasureFamily {
        partition: part.clone(),
        weight,
    }
}

/// Block masses `π̃(A_i) = Σ_{s ∈ A_i} π(s)`.
pub fn restrict(pi: &Distribution, part: &Partition) -> Result<Distribution, AggregationError> {
    part.compatible(pi.len())?;
    let w = part
        .blocks()
        .iter()
        .map(|members| members.iter().map(|&s| pi[s]).sum())
        .collect();
    Ok(Distribution::new(w)?)
}

/// De-aggregation: `π(s) = π̃(block(s)) · α_{block(s)}(s)`.
pub fn lift(pi_blocks: &Distribution, alphas: &MeasureFamily) -> Result<Distribution, AggregationError> {
    let part = alphas.partition();
    if pi_blocks.len() != part.len() {
        return Err(MarkovError::DimensionMismatch {
            expected: part.len(),
            found: pi_blocks.len(),
        }
        .into());
    }
    let w = (0..part.n_states())
        .map(|s| pi_blocks[part.block_of(s)] * alphas.alpha(s))
        .collect();
    Ok(Distribution::new(w)?)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RespectReport {
    pub holds: bool,
    /// Largest `|π(s)/π(A_i) − α_i(s)|` over blocks of positive mass.
    pub deviation: f64,
}

/// Whether the block-conditional distributions of `pi` equal the block
/// measures. Blocks of zero mass impose no constraint.
pub fn respects(pi: &Distribution, alphas: &MeasureFamily) -> Result<RespectReport, AggregationError> {
    let part = alphas.partition();
    part.compatible(pi.len())?;
    let mut deviation = 0.0f64;
    for members in part.blocks() {
        let mass: f64 = members.iter().map(|&s| pi[s]).sum();
        if mass <= 0.0 {
            continue;
        }
        for &s in members {
            deviation = deviation.max((pi[s] / mass - alphas.alpha(s)).abs());
        }
    }
    Ok(RespectReport {
        holds: deviation <= RESPECT_TOL,
        deviation,
    })
}

/// True when every block of `coarse` is a union of blocks of `fine`.
pub fn refines(fine: &Partition, coarse: &Partition) -> bool {
    fine.n_states() == coarse.n_states()
        && fine.blocks().iter().all(|members| {
            let b = coarse.block_of(members[0]);
            members.iter().all(|&s| coarse.block_of(s) == b)
        })
}

/// The aggregation of a fine-block chain onto the coarse blocks.
#[derive(Clone, Debug, PartialEq)]
pub struct NestedAggregation {
    /// Partition of the fine-block index space: block `j` lists the fine
    /// blocks contained in coarse block `j`.
    pub blocks: Partition,
    /// `α′_j(A_i) = |A_i| / |B_j|` for `A_i ⊆ B_j`.
    pub alpha_prime: MeasureFamily,
}

/// Relates two uniform aggregations where `fine` refines `coarse`.
pub fn nested(fine: &Partition, coarse: &Partition) -> Result<NestedAggregation, AggregationError> {
    coarse.compatible(fine.n_states())?;
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); coarse.len()];
    for (i, members) in fine.blocks().iter().enumerate() {
        let j = coarse.block_of(members[0]);
        if members.iter().any(|&s| coarse.block_of(s) != j) {
            return Err(AggregationError::NotNested { block: i });
        }
        groups[j].push(i);
    }
    let blocks = Partition::new(fine.len(), groups)?;
    let weight = (0..fine.len())
        .map(|i| {
            let j = coarse.block_of(fine.block(i)[0]);
            fine.block(i).len() as f64 / coarse.block(j).len() as f64
        })
        .collect();
    let alpha_prime = MeasureFamily::new(&blocks, weight)?;
    Ok(NestedAggregation { blocks, alpha_prime })
}
