use serde::{Deserialize, Serialize};

use super::{MarkovError, ROW_SUM_TOL};
use crate::par;

/// Square sparse matrix with sorted rows and a column-major mirror.
///
/// Explicit zeros are dropped and duplicate coordinates are summed on
/// construction.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    dim: usize,
    rows: Vec<Vec<(usize, f64)>>,
    cols: Vec<Vec<(usize, f64)>>,
}

impl SparseMatrix {
    pub fn from_triplets<I>(dim: usize, triplets: I) -> Result<Self, MarkovError>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        if dim == 0 {
            return Err(MarkovError::EmptyMatrix);
        }
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); dim];
        for (row, col, value) in triplets {
            if row >= dim || col >= dim {
                return Err(MarkovError::OutOfBounds { row, col, dim });
            }
            if !value.is_finite() {
                return Err(MarkovError::NonFinite { row, col, value });
            }
            rows[row].push((col, value));
        }
        for row in rows.iter_mut() {
            // stable: duplicates are summed in input order
            row.sort_by_key(|&(c, _)| c);
            let mut merged: Vec<(usize, f64)> = Vec::with_capacity(row.len());
            for &(c, v) in row.iter() {
                match merged.last_mut() {
                    Some((lc, lv)) if *lc == c => *lv += v,
                    _ => merged.push((c, v)),
                }
            }
            merged.retain(|&(_, v)| v != 0.0);
            *row = merged;
        }
        Ok(Self::from_sorted_rows(dim, rows))
    }

    fn from_sorted_rows(dim: usize, rows: Vec<Vec<(usize, f64)>>) -> Self {
        let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); dim];
        for (r, row) in rows.iter().enumerate() {
            for &(c, v) in row {
                cols[c].push((r, v));
            }
        }
        Self { dim, rows, cols }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_sorted_rows(dim, (0..dim).map(|i| vec![(i, 1.0)]).collect())
    }

    pub fn zero(dim: usize) -> Self {
        Self::from_sorted_rows(dim, vec![Vec::new(); dim])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// Nonzero entries of row `i`, sorted by column.
    pub fn row(&self, i: usize) -> &[(usize, f64)] {
        &self.rows[i]
    }

    /// Nonzero entries of column `j`, sorted by row.
    pub fn col(&self, j: usize) -> &[(usize, f64)] {
        &self.cols[j]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let row = &self.rows[i];
        match row.binary_search_by_key(&j, |&(c, _)| c) {
            Ok(k) => row[k].1,
            Err(_) => 0.0,
        }
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().map(move |&(c, v)| (r, c, v)))
    }

    pub fn row_sum(&self, i: usize) -> f64 {
        self.rows[i].iter().map(|&(_, v)| v).sum()
    }

    /// Row vector times matrix, `v K`. Each output entry is summed over its
    /// column in ascending row order.
    pub fn left_mul(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.dim, "vector length must match the matrix");
        par::map_range(self.dim, |j| self.cols[j].iter().map(|&(r, x)| v[r] * x).sum::<f64>())
    }

    /// Dense row-major copy.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut out = vec![vec![0.0; self.dim]; self.dim];
        for (r, c, v) in self.triplets() {
            out[r][c] = v;
        }
        out
    }

    /// Largest absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &SparseMatrix) -> f64 {
        assert_eq!(self.dim, other.dim);
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            let (a, b) = (&self.rows[i], &other.rows[i]);
            let (mut x, mut y) = (0, 0);
            while x < a.len() || y < b.len() {
                let d = match (a.get(x), b.get(y)) {
                    (Some(&(ca, va)), Some(&(cb, vb))) if ca == cb => {
                        x += 1;
                        y += 1;
                        va - vb
                    }
                    (Some(&(ca, va)), Some(&(cb, _))) if ca < cb => {
                        x += 1;
                        va
                    }
                    (Some(&(_, va)), None) => {
                        x += 1;
                        va
                    }
                    (_, Some(&(_, vb))) => {
                        y += 1;
                        vb
                    }
                    (None, None) => unreachable!(),
                };
                worst = worst.max(d.abs());
            }
        }
        worst
    }

    fn row_scale(&self, i: usize) -> f64 {
        self.rows[i].iter().map(|&(_, v)| v.abs()).sum::<f64>().max(1.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChainKind {
    Stochastic,
    Rate,
}

/// Common view of discrete-time (transition) and continuous-time (generator)
/// kernels, so that structural analyses and aggregation work on either.
pub trait Kernel: Sized + Clone + Send + Sync {
    const KIND: ChainKind;

    fn matrix(&self) -> &SparseMatrix;

    /// Validating constructor used when an operation produces a new kernel of
    /// the same kind.
    fn from_matrix(m: SparseMatrix) -> Result<Self, MarkovError>;

    fn dim(&self) -> usize {
        self.matrix().dim()
    }

    /// Largest absolute deviation of a row sum from its target (1 or 0).
    fn row_sum_residual(&self) -> f64 {
        let target = match Self::KIND {
            ChainKind::Stochastic => 1.0,
            ChainKind::Rate => 0.0,
        };
        let m = self.matrix();
        (0..m.dim()).map(|i| (m.row_sum(i) - target).abs()).fold(0.0, f64::max)
    }
}

/// Row-stochastic transition matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct StochasticMatrix(SparseMatrix);

impl StochasticMatrix {
    pub fn new(m: SparseMatrix) -> Result<Self, MarkovError> {
        for i in 0..m.dim() {
            for &(c, v) in m.row(i) {
                if v < 0.0 {
                    return Err(MarkovError::NegativeEntry {
                        row: i,
                        col: c,
                        value: v,
                    });
                }
            }
            let sum = m.row_sum(i);
            if (sum - 1.0).abs() > ROW_SUM_TOL * m.row_scale(i) {
                return Err(MarkovError::RowSum {
                    row: i,
                    sum,
                    expected: 1.0,
                });
            }
        }
        Ok(Self(m))
    }

    pub fn from_triplets<I>(dim: usize, triplets: I) -> Result<Self, MarkovError>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        Self::new(SparseMatrix::from_triplets(dim, triplets)?)
    }

    pub fn from_dense(rows: &[Vec<f64>]) -> Result<Self, MarkovError> {
        Self::from_triplets(rows.len(), dense_triplets(rows))
    }

    pub fn identity(dim: usize) -> Self {
        Self(SparseMatrix::identity(dim))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0.get(i, j)
    }
}

impl Kernel for StochasticMatrix {
    const KIND: ChainKind = ChainKind::Stochastic;

    fn matrix(&self) -> &SparseMatrix {
        &self.0
    }

    fn from_matrix(m: SparseMatrix) -> Result<Self, MarkovError> {
        Self::new(m)
    }
}

/// Generator matrix of a CTMC: nonnegative off-diagonal, zero row sums.
#[derive(Clone, Debug, PartialEq)]
pub struct RateMatrix(SparseMatrix);

impl RateMatrix {
    pub fn new(m: SparseMatrix) -> Result<Self, MarkovError> {
        for i in 0..m.dim() {
            for &(c, v) in m.row(i) {
                if c != i && v < 0.0 {
                    return Err(MarkovError::NegativeEntry {
                        row: i,
                        col: c,
                        value: v,
                    });
                }
            }
            let sum = m.row_sum(i);
            if sum.abs() > ROW_SUM_TOL * m.row_scale(i) {
                return Err(MarkovError::RowSum {
                    row: i,
                    sum,
                    expected: 0.0,
                });
            }
        }
        Ok(Self(m))
    }

    pub fn from_triplets<I>(dim: usize, triplets: I) -> Result<Self, MarkovError>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        Self::new(SparseMatrix::from_triplets(dim, triplets)?)
    }

    /// Builds a generator from off-diagonal rates; diagonal entries supplied
    /// in `rates` are ignored and replaced by the negated off-diagonal sums.
    pub fn from_off_diagonal<I>(dim: usize, rates: I) -> Result<Self, MarkovError>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let off = SparseMatrix::from_triplets(dim, rates.into_iter().filter(|&(r, c, _)| r != c))?;
        let mut triplets: Vec<(usize, usize, f64)> = off.triplets().collect();
        for i in 0..dim {
            let exit: f64 = off.row(i).iter().map(|&(_, v)| v).sum();
            triplets.push((i, i, -exit));
        }
        Self::from_triplets(dim, triplets)
    }

    pub fn from_dense(rows: &[Vec<f64>]) -> Result<Self, MarkovError> {
        Self::from_triplets(rows.len(), dense_triplets(rows))
    }

    pub fn zero(dim: usize) -> Self {
        Self(SparseMatrix::zero(dim))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0.get(i, j)
    }

    /// `q_i = -Q(i, i)`.
    pub fn exit_rate(&self, i: usize) -> f64 {
        -self.0.get(i, i)
    }

    pub fn max_exit_rate(&self) -> f64 {
        (0..self.0.dim()).map(|i| self.exit_rate(i)).fold(0.0, f64::max)
    }
}

impl Kernel for RateMatrix {
    const KIND: ChainKind = ChainKind::Rate;

    fn matrix(&self) -> &SparseMatrix {
        &self.0
    }

    fn from_matrix(m: SparseMatrix) -> Result<Self, MarkovError> {
        Self::new(m)
    }
}

fn dense_triplets(rows: &[Vec<f64>]) -> Vec<(usize, usize, f64)> {
    rows.iter()
        .enumerate()
        .flat_map(|(r, row)| row.iter().enumerate().map(move |(c, &v)| (r, c, v)))
        .collect()
}
