use super::{Distribution, Kernel, MarkovError, RateMatrix, SparseMatrix, StochasticMatrix};
use crate::par;

/// Default ratio between the uniformization rate and the largest exit rate.
pub const DEFAULT_SLACK: f64 = 1.05;

/// Hard cap on the number of Poisson terms summed by [`transient`].
pub const MAX_POISSON_TERMS: usize = 1_000_000;

/// `M = I + Q / r`. Requires `r` strictly above every exit rate.
pub fn uniformize(q: &RateMatrix, r: f64) -> Result<StochasticMatrix, MarkovError> {
    let max_exit = q.max_exit_rate();
    if !(r > max_exit) || !r.is_finite() {
        return Err(MarkovError::RateBoundViolated { rate: r, max_exit });
    }
    let n = q.dim();
    let triplets = q
        .matrix()
        .triplets()
        .map(|(i, j, v)| (i, j, v / r))
        .chain((0..n).map(|i| (i, i, 1.0)));
    StochasticMatrix::new(SparseMatrix::from_triplets(n, triplets)?)
}

/// `slack * max_i q_i`, or 1 for the zero generator.
pub fn default_uniformization_rate(q: &RateMatrix, slack: f64) -> f64 {
    let max_exit = q.max_exit_rate();
    if max_exit > 0.0 {
        slack * max_exit
    } else {
        1.0
    }
}

/// Poisson(`lambda`) probabilities `w_0, w_1, ...` up to the first index at
/// which the cumulative mass reaches `1 - tol` (or [`MAX_POISSON_TERMS`]).
/// Computed in log space so that large `lambda` does not underflow `w_0`.
pub fn poisson_weights(lambda: f64, tol: f64) -> Vec<f64> {
    let mut out = Vec::new();
    if lambda == 0.0 {
        out.push(1.0);
        return out;
    }
    let ln_lambda = lambda.ln();
    let mut log_w = -lambda;
    let mut cumulative = 0.0;
    for k in 0..MAX_POISSON_TERMS {
        if k > 0 {
            log_w += ln_lambda - (k as f64).ln();
        }
        let w = log_w.exp();
        out.push(w);
        cumulative += w;
        if cumulative >= 1.0 - tol {
            break;
        }
        // past the mode the remaining tail is below representable precision
        if (k as f64) > lambda && w == 0.0 {
            break;
        }
    }
    out
}

/// Transient distribution `π₀ e^{Qt}` computed by uniformization at rate
/// `DEFAULT_SLACK * max_i q_i`.
pub fn transient(q: &RateMatrix, pi0: &Distribution, t: f64, tol: f64) -> Result<Distribution, MarkovError> {
    transient_with_rate(q, pi0, t, tol, default_uniformization_rate(q, DEFAULT_SLACK))
}

/// As [`transient`] with an explicit uniformization rate `r`.
///
/// Evaluates `Σ_k e^{-rt}(rt)^k/k! · π₀ Mᵏ` with `M = I + Q/r`, truncated once
/// the accumulated Poisson weight reaches `1 - tol`, then renormalized.
pub fn transient_with_rate(
    q: &RateMatrix,
    pi0: &Distribution,
    t: f64,
    tol: f64,
    r: f64,
) -> Result<Distribution, MarkovError> {
    check_len(q.dim(), pi0)?;
    if !(t >= 0.0) || !t.is_finite() {
        return Err(MarkovError::InvalidArgument(format!(
            "time {t} must be a nonnegative number"
        )));
    }
    if !(tol > 0.0) {
        return Err(MarkovError::InvalidArgument(format!(
            "tolerance {tol} must be positive"
        )));
    }
    if t == 0.0 || q.max_exit_rate() == 0.0 {
        return Ok(pi0.clone());
    }
    let m = uniformize(q, r)?;
    let weights = poisson_weights(r * t, tol);
    let mut term = pi0.weights().to_vec();
    let mut acc = vec![0.0; term.len()];
    for (k, &w) in weights.iter().enumerate() {
        if k > 0 {
            term = m.matrix().left_mul(&term);
        }
        if w > 0.0 {
            for (a, x) in acc.iter_mut().zip(&term) {
                *a += w * x;
            }
        }
    }
    Distribution::normalized(acc)
}

/// Transient distributions at several time points, evaluated independently
/// (in parallel when enabled). Output order follows `times`.
pub fn transient_many(
    q: &RateMatrix,
    pi0: &Distribution,
    times: &[f64],
    tol: f64,
) -> Result<Vec<Distribution>, MarkovError> {
    par::map_slice(times, |&t| transient(q, pi0, t, tol))
        .into_iter()
        .collect()
}

/// `π₀ Pⁿ`.
pub fn evolve_discrete(p: &StochasticMatrix, pi0: &Distribution, n: usize) -> Result<Distribution, MarkovError> {
    check_len(p.dim(), pi0)?;
    let mut v = pi0.weights().to_vec();
    for _ in 0..n {
        v = p.matrix().left_mul(&v);
    }
    Distribution::normalized(v)
}

/// Cesàro average `(1/n) Σ_{k=1..n} π₀ Pᵏ`.
pub fn cesaro(p: &StochasticMatrix, pi0: &Distribution, n: usize) -> Result<Distribution, MarkovError> {
    check_len(p.dim(), pi0)?;
    if n == 0 {
        return Err(MarkovError::InvalidArgument("Cesàro average needs n >= 1".into()));
    }
    let mut v = pi0.weights().to_vec();
    let mut acc = vec![0.0; v.len()];
    for _ in 0..n {
        v = p.matrix().left_mul(&v);
        for (a, x) in acc.iter_mut().zip(&v) {
            *a += x;
        }
    }
    let inv = 1.0 / n as f64;
    Distribution::normalized(acc.into_iter().map(|a| a * inv).collect())
}

fn check_len(dim: usize, pi: &Distribution) -> Result<(), MarkovError> {
    if pi.len() != dim {
        return Err(MarkovError::DimensionMismatch {
            expected: dim,
            found: pi.len(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::markov::stationary;

    fn q2() -> RateMatrix {
        RateMatrix::from_dense(&[vec![-1.0, 1.0], vec![2.0, -2.0]]).unwrap()
    }

    #[test]
    fn uniformize_substitution() {
        let m = uniformize(&q2(), 4.0).unwrap();
        assert_eq!(m.matrix().to_dense(), vec![vec![0.75, 0.25], vec![0.5, 0.5]]);
    }

    #[test]
    fn uniformize_rate_bound_is_strict() {
        assert_eq!(
            uniformize(&q2(), 2.0),
            Err(MarkovError::RateBoundViolated {
                rate: 2.0,
                max_exit: 2.0
            })
        );
    }

    #[test]
    fn uniformize_zero_generator_is_identity() {
        let m = uniformize(&RateMatrix::zero(3), 0.7).unwrap();
        assert_eq!(m, StochasticMatrix::identity(3));
    }

    #[test]
    fn transient_zero_generator_and_zero_time() {
        let pi0 = Distribution::new(vec![0.3, 0.7]).unwrap();
        let q0 = RateMatrix::zero(2);
        assert_eq!(transient(&q0, &pi0, 7.0, 1e-12).unwrap(), pi0);
        assert_eq!(transient(&q2(), &pi0, 0.0, 1e-12).unwrap(), pi0);
    }

    #[test]
    fn transient_symmetric_two_state_closed_form() {
        // eigen-decomposition: p(t) = ((1 + e^{-2t})/2, (1 - e^{-2t})/2)
        let q = RateMatrix::from_dense(&[vec![-1.0, 1.0], vec![1.0, -1.0]]).unwrap();
        let pi = transient(&q, &Distribution::point(2, 0), 1.0, 1e-14).unwrap();
        let e = (-2.0f64).exp();
        assert!((pi[0] - (1.0 + e) / 2.0).abs() < 1e-13);
        assert!((pi[1] - (1.0 - e) / 2.0).abs() < 1e-13);
    }

    #[test]
    fn transient_long_time_reaches_stationary() {
        let pi = transient(&q2(), &Distribution::point(2, 1), 60.0, 1e-13).unwrap();
        let mu = stationary(&q2()).unwrap();
        assert!(pi.max_abs_diff(&mu) < 1e-12);
    }

    #[test]
    fn poisson_weights_large_lambda_do_not_underflow() {
        let w = poisson_weights(2000.0, 1e-12);
        let total: f64 = w.iter().sum();
        assert!((total - 1.0).abs() < 1e-10, "total {total}");
    }

    #[test]
    fn evolve_and_cesaro_basics() {
        let swap = StochasticMatrix::from_dense(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let e0 = Distribution::point(2, 0);
        assert_eq!(evolve_discrete(&swap, &e0, 0).unwrap(), e0);
        assert_eq!(evolve_discrete(&swap, &e0, 3).unwrap().weights(), &[0.0, 1.0]);
        assert_eq!(cesaro(&swap, &e0, 2).unwrap().weights(), &[0.5, 0.5]);
        let id = StochasticMatrix::identity(2);
        let pi = Distribution::new(vec![0.2, 0.8]).unwrap();
        assert_eq!(evolve_discrete(&id, &pi, 5).unwrap(), pi);
        assert_eq!(cesaro(&id, &pi, 9).unwrap(), pi);
        assert!(cesaro(&id, &pi, 0).is_err());
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let err = transient(&q2(), &Distribution::point(3, 0), 1.0, 1e-9).unwrap_err();
        assert_eq!(err, MarkovError::DimensionMismatch { expected: 2, found: 3 });
    }
}
