//! Deterministic summation and Monte Carlo error bookkeeping.

use serde::{Deserialize, Serialize};

/// Pairwise (cascade) summation in a fixed order.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const LEAF: usize = 32;
    if xs.len() <= LEAF {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    pairwise_sum(xs) / xs.len() as f64
}

/// Sample standard deviation (Bessel-corrected).
pub fn std_dev(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    let sq: Vec<f64> = xs.iter().map(|x| (x - m) * (x - m)).collect();
    (pairwise_sum(&sq) / (xs.len() - 1) as f64).sqrt()
}

/// A stochastic estimate together with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub se: f64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Self { value, se: 0.0 }
    }

    /// Estimate of `Σ_j w_j x_j` from the weighted terms.
    ///
    /// The terms `t_j = M w_j x_j` have mean equal to the weighted sum, so the
    /// standard error is `sd(t) / √M`. For stratified designs this is the
    /// i.i.d. bound and overstates the actual error.
    pub fn from_weighted_terms(weights: &[f64], values: &[f64]) -> Self {
        debug_assert_eq!(weights.len(), values.len());
        let m = values.len() as f64;
        let terms: Vec<f64> = weights.iter().zip(values).map(|(w, x)| m * w * x).collect();
        let value = mean(&terms);
        let se = if terms.len() > 1 {
            std_dev(&terms) / m.sqrt()
        } else {
            0.0
        };
        Self { value, se }
    }

    pub fn from_samples(values: &[f64]) -> Self {
        let n = values.len().max(1) as f64;
        Self {
            value: mean(values),
            se: std_dev(values) / n.sqrt(),
        }
    }

    pub fn scale(self, c: f64) -> Self {
        Self {
            value: self.value * c,
            se: self.se * c.abs(),
        }
    }

    /// Combined standard error of a difference of independent estimates.
    pub fn combined_se(&self, other: &Self) -> f64 {
        self.se.hypot(other.se)
    }
}

/// The default tolerance policy: `max(floor, multiplier · se)`.
pub fn tolerance(se: f64, multiplier: f64, floor: f64) -> f64 {
    (multiplier * se).max(floor)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_sum_of_ones_is_exact() {
        let xs = vec![1.0; 20_011];
        assert_eq!(pairwise_sum(&xs), 20_011.0);
    }

    #[test]
    fn weighted_terms_reduce_to_plain_mean() {
        let w = vec![0.25; 4];
        let x = [1.0, 2.0, 3.0, 4.0];
        let e = Estimate::from_weighted_terms(&w, &x);
        assert!((e.value - 2.5).abs() < 1e-15);
        let s = Estimate::from_samples(&x);
        assert!((e.se - s.se).abs() < 1e-15);
    }
}
