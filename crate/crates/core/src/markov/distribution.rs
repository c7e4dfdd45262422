use super::{MarkovError, MASS_TOL};

/// Probability vector over an indexed state space.
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution(Vec<f64>);

impl Distribution {
    pub fn new(weights: Vec<f64>) -> Result<Self, MarkovError> {
        if weights.is_empty() {
            return Err(MarkovError::InvalidDistribution("empty weight vector".into()));
        }
        if let Some((i, w)) = weights.iter().enumerate().find(|(_, w)| !w.is_finite() || **w < 0.0) {
            return Err(MarkovError::InvalidDistribution(format!("weight {w} at position {i}")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(MarkovError::InvalidDistribution(format!("weights sum to {total}")));
        }
        Ok(Self(weights))
    }

    /// Clamps round-off negatives (above `-1e-12`) to zero and rescales to unit
    /// mass. Used on the output of numerical solvers.
    pub fn normalized(mut weights: Vec<f64>) -> Result<Self, MarkovError> {
        for w in weights.iter_mut() {
            if *w < 0.0 && *w > -1e-12 {
                *w = 0.0;
            }
        }
        let total: f64 = weights.iter().sum();
        if !(total.is_finite() && total > 0.0) {
            return Err(MarkovError::InvalidDistribution(format!(
                "cannot normalize weights with total {total}"
            )));
        }
        Self::new(weights.into_iter().map(|w| w / total).collect())
    }

    pub fn point(len: usize, at: usize) -> Self {
        assert!(at < len);
        let mut w = vec![0.0; len];
        w[at] = 1.0;
        Self(w)
    }

    pub fn uniform(len: usize) -> Self {
        assert!(len > 0);
        Self(vec![1.0 / len as f64; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.0
    }

    pub fn into_weights(self) -> Vec<f64> {
        self.0
    }

    pub fn max_abs_diff(&self, other: &Distribution) -> f64 {
        assert_eq!(self.len(), other.len());
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl std::ops::Index<usize> for Distribution {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}
