use crate::aggregation::Partition;
use crate::markov::{RateMatrix, StateSpace};

/// A six-state generator whose two blocks satisfy the permutation criterion.
#[derive(Clone, Debug, PartialEq)]
pub struct LumpingExample {
    pub space: StateSpace,
    pub rates: RateMatrix,
    pub partition: Partition,
}

/// States `G1, G2, G1', G2', G, G'` with blocks `{G1, G2, G1', G2'}` and
/// `{G, G'}`. `G` is entered from `G1` at rate `c1` and from `G2` at rate `c2`;
/// `G'` likewise from `G1'` and `G2'`. The swap `G1↔G1', G2↔G2', G↔G'` is a
/// rate-preserving symmetry, and with `c1 = 1, c2 = 3` every state of the
/// first block also has exit rate 4, so the diagonal entries agree too.
pub fn lumping_example(c1: f64, c2: f64) -> LumpingExample {
    let (g1, g2, h1, h2, g, h) = (0, 1, 2, 3, 4, 5);
    let rates = vec![
        (g1, g, c1),
        (g2, g, c2),
        (h1, h, c1),
        (h2, h, c2),
        (g1, g2, 1.0),
        (g1, h1, 1.0),
        (g1, h2, 1.0),
        (g2, g1, 1.0),
        (h1, g1, 1.0),
        (h1, g2, 1.0),
        (h1, h2, 1.0),
        (h2, h1, 1.0),
        (g, g1, 1.0),
        (g, g2, 1.0),
        (h, h1, 1.0),
        (h, h2, 1.0),
    ];
    let keys = ["G1", "G2", "G1'", "G2'", "G", "G'"];
    LumpingExample {
        space: StateSpace::new(keys.iter().map(|k| k.to_string()).collect()).expect("distinct"),
        rates: RateMatrix::from_off_diagonal(6, rates).expect("valid rates"),
        partition: Partition::new(6, vec![vec![g1, g2, h1, h2], vec![g, h]]).expect("valid blocks"),
    }
}
