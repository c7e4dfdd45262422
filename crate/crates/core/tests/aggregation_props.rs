use lumpkit::aggregation::{
    aggregate, check_cond3, check_condition, lift, nested, respects, restrict, uniform_measures, MeasureFamily,
    Partition,
};
use lumpkit::markov::{evolve_discrete, stationary, transient, Distribution, Kernel, RateMatrix, StochasticMatrix};
use proptest::prelude::*;

/// A chain `K(s', s) = α_j(s) R(s', j)` for `s ∈ A_j`, where each row of `R`
/// is a distribution over blocks. Satisfies the backward condition for the
/// supplied non-uniform measures.
#[derive(Debug, Clone)]
struct ProductChain {
    part: Partition,
    alphas: MeasureFamily,
    p: StochasticMatrix,
}

fn product_chain() -> impl Strategy<Value = ProductChain> {
    (2usize..5, 1usize..4)
        .prop_flat_map(|(m, max_size)| (prop::collection::vec(1..=max_size, m), Just(m)))
        .prop_flat_map(|(sizes, m)| {
            let n: usize = sizes.iter().sum();
            (
                Just(sizes),
                prop::collection::vec(0.1f64..1.0, n),
                prop::collection::vec(prop::collection::vec(0.05f64..1.0, m), n),
            )
        })
        .prop_map(|(sizes, raw_alpha, raw_r)| {
            let mut blocks = Vec::new();
            let mut next = 0;
            for &k in &sizes {
                blocks.push((next..next + k).collect::<Vec<_>>());
                next += k;
            }
            let n = next;
            let part = Partition::new(n, blocks).unwrap();
            let mut alpha = raw_alpha.clone();
            for members in part.blocks() {
                let total: f64 = members.iter().map(|&s| raw_alpha[s]).sum();
                for &s in members {
                    alpha[s] = raw_alpha[s] / total;
                }
            }
            let alphas = MeasureFamily::new(&part, alpha).unwrap();
            let mut dense = vec![vec![0.0; n]; n];
            for (src, row) in raw_r.iter().enumerate() {
                let total: f64 = row.iter().sum();
                for s in 0..n {
                    dense[src][s] = alphas.alpha(s) * row[part.block_of(s)] / total;
                }
            }
            let p = StochasticMatrix::from_dense(&dense).unwrap();
            ProductChain { part, alphas, p }
        })
}

fn to_rate(p: &StochasticMatrix, r: f64) -> RateMatrix {
    let n = p.dim();
    let rates = p
        .matrix()
        .triplets()
        .filter(|&(i, j, _)| i != j)
        .map(|(i, j, v)| (i, j, r * v));
    RateMatrix::from_off_diagonal(n, rates.collect::<Vec<_>>()).unwrap()
}

/// States `(x, a, b)` with rates depending only on `x`, `y` and the
/// translation `(a' - a, b' - b)` in `Z_ca × Z_cb`.
#[derive(Debug, Clone)]
struct OrbitChain {
    xs: usize,
    ca: usize,
    cb: usize,
    q: RateMatrix,
}

impl OrbitChain {
    fn index(&self, x: usize, a: usize, b: usize) -> usize {
        (x * self.ca + a) * self.cb + b
    }

    fn n(&self) -> usize {
        self.xs * self.ca * self.cb
    }

    /// Blocks `{(x, ·, b)}`.
    fn fine(&self) -> Partition {
        let mut blocks = Vec::new();
        for x in 0..self.xs {
            for b in 0..self.cb {
                blocks.push((0..self.ca).map(|a| self.index(x, a, b)).collect());
            }
        }
        Partition::new(self.n(), blocks).unwrap()
    }

    /// Blocks `{(x, ·, ·)}`.
    fn coarse(&self) -> Partition {
        let blocks = (0..self.xs)
            .map(|x| {
                (0..self.ca)
                    .flat_map(|a| (0..self.cb).map(move |b| (a, b)))
                    .map(|(a, b)| self.index(x, a, b))
                    .collect()
            })
            .collect();
        Partition::new(self.n(), blocks).unwrap()
    }
}

fn orbit_chain() -> impl Strategy<Value = OrbitChain> {
    (1usize..4, 1usize..4, 1usize..3)
        .prop_flat_map(|(xs, ca, cb)| {
            let len = xs * xs * ca * cb;
            (Just((xs, ca, cb)), prop::collection::vec(0u8..4, len))
        })
        .prop_map(|((xs, ca, cb), f)| {
            let mut chain = OrbitChain {
                xs,
                ca,
                cb,
                q: RateMatrix::zero(1),
            };
            let f_at =
                |x: usize, y: usize, da: usize, db: usize| -> f64 { f[((x * xs + y) * ca + da) * cb + db] as f64 };
            let mut rates = Vec::new();
            for x in 0..xs {
                for a in 0..ca {
                    for b in 0..cb {
                        for y in 0..xs {
                            for a2 in 0..ca {
                                for b2 in 0..cb {
                                    let from = chain.index(x, a, b);
                                    let to = chain.index(y, a2, b2);
                                    if from == to {
                                        continue;
                                    }
                                    let v = f_at(x, y, (a2 + ca - a) % ca, (b2 + cb - b) % cb);
                                    if v > 0.0 {
                                        rates.push((from, to, v));
                                    }
                                }
                            }
                        }
                    }
                }
            }
            chain.q = RateMatrix::from_off_diagonal(chain.n(), rates).unwrap();
            chain
        })
}

fn block_distribution() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..1.0, 8)
}

fn normalize(raw: &[f64], m: usize) -> Distribution {
    let mut w: Vec<f64> = raw.iter().take(m).map(|x| x + 1e-3).collect();
    w.resize(m, 1e-3);
    let total: f64 = w.iter().sum();
    Distribution::new(w.into_iter().map(|x| x / total).collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn product_chain_satisfies_condition(c in product_chain()) {
        let report = check_condition(&c.p, &c.part, &c.alphas, 1e-12).unwrap();
        prop_assert!(report.holds, "residual {}", report.residual);
        let agg = aggregate(&c.p, &c.part, &c.alphas, 1e-12).unwrap();
        prop_assert!(agg.matrix.row_sum_residual() <= 1e-11);
        let q = to_rate(&c.p, 2.0);
        let qa = aggregate(&q, &c.part, &c.alphas, 1e-12).unwrap();
        prop_assert!(qa.matrix.row_sum_residual() <= 1e-11);
    }

    #[test]
    fn lumpability_and_invertibility(c in product_chain(), raw in block_distribution(), t in 0.0f64..4.0) {
        let q = to_rate(&c.p, 1.5);
        let agg = aggregate(&q, &c.part, &c.alphas, 1e-9).unwrap();
        let pi0 = lift(&normalize(&raw, c.part.len()), &c.alphas).unwrap();
        let x = transient(&q, &pi0, t, 1e-14).unwrap();
        let y = transient(&agg.matrix, &restrict(&pi0, &c.part).unwrap(), t, 1e-14).unwrap();
        prop_assert!(restrict(&x, &c.part).unwrap().max_abs_diff(&y) <= 1e-9);
        prop_assert!(x.max_abs_diff(&lift(&y, &c.alphas).unwrap()) <= 1e-9);

        let pa = aggregate(&c.p, &c.part, &c.alphas, 1e-9).unwrap();
        let xd = evolve_discrete(&c.p, &pi0, 4).unwrap();
        let yd = evolve_discrete(&pa.matrix, &restrict(&pi0, &c.part).unwrap(), 4).unwrap();
        prop_assert!(restrict(&xd, &c.part).unwrap().max_abs_diff(&yd) <= 1e-9);
    }

    #[test]
    fn stationary_distribution_respects_measures(c in product_chain()) {
        let mu = stationary(&c.p).unwrap();
        let rep = respects(&mu, &c.alphas).unwrap();
        prop_assert!(rep.deviation <= 1e-9, "deviation {}", rep.deviation);
        let agg = aggregate(&c.p, &c.part, &c.alphas, 1e-9).unwrap();
        let mu_agg = stationary(&agg.matrix).unwrap();
        prop_assert!(restrict(&mu, &c.part).unwrap().max_abs_diff(&mu_agg) <= 1e-9);
    }

    #[test]
    fn restrict_inverts_lift(c in product_chain(), raw in block_distribution()) {
        let x = normalize(&raw, c.part.len());
        let lifted = lift(&x, &c.alphas).unwrap();
        prop_assert!(restrict(&lifted, &c.part).unwrap().max_abs_diff(&x) <= 1e-15);
        let back = lift(&restrict(&lifted, &c.part).unwrap(), &c.alphas).unwrap();
        prop_assert!(back.max_abs_diff(&lifted) <= 1e-12);
    }

    #[test]
    fn orbit_chain_passes_permutation_check(c in orbit_chain()) {
        for part in [c.fine(), c.coarse()] {
            prop_assert!(check_cond3(&c.q, &part));
            let report = check_condition(&c.q, &part, &uniform_measures(&part), 1e-12).unwrap();
            prop_assert!(report.holds, "residual {}", report.residual);
        }
    }

    #[test]
    fn nested_uniform_aggregations(c in orbit_chain()) {
        let (fine, coarse) = (c.fine(), c.coarse());
        let qf = aggregate(&c.q, &fine, &uniform_measures(&fine), 1e-12).unwrap();
        let qc = aggregate(&c.q, &coarse, &uniform_measures(&coarse), 1e-12).unwrap();
        let nest = nested(&fine, &coarse).unwrap();
        let report = check_condition(&qf.matrix, &nest.blocks, &nest.alpha_prime, 1e-12).unwrap();
        prop_assert!(report.holds, "residual {}", report.residual);
        let again = aggregate(&qf.matrix, &nest.blocks, &nest.alpha_prime, 1e-12).unwrap();
        prop_assert!(again.matrix.matrix().max_abs_diff(qc.matrix.matrix()) <= 1e-11);
    }
}
