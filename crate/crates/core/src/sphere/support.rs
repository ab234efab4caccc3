//! Numerical sublinearity test for candidate support functions.

use serde::{Deserialize, Serialize};

use super::function::SphericalFunction;
use crate::error::{invalid, Result};
use crate::linalg::gaussian_vector;
use crate::rng::{stream, tags};

/// Smallest trial count accepted by [`is_support_function`].
pub const MIN_TRIALS: usize = 1000;

/// A violating pair: `H(x + y) > H(x) + H(y) + tol`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SublinearityWitness {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// `H(x + y)`.
    pub lhs: f64,
    /// `H(x) + H(y)`.
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportCheck {
    pub holds: bool,
    pub trials: usize,
    pub tolerance: f64,
    /// Largest observed `H(x+y) - H(x) - H(y)`.
    pub max_violation: f64,
    pub witness: Option<SublinearityWitness>,
}

/// Tolerance covering the interpolation error of a tabulated support
/// function: the squared node spacing times the largest absolute value.
pub fn interpolation_allowance(f: &SphericalFunction) -> f64 {
    let h = f.grid().spacing();
    let scale = f.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    h * h * scale
}

/// Samples Gaussian pairs `x, y` and checks `H(x+y) ≤ H(x) + H(y) + tol`
/// for the 1-homogeneous extension `H(x) = |x| h(x/|x|)` of `h`.
pub fn check_sublinear(
    n: usize,
    h: impl Fn(&[f64]) -> f64,
    trials: usize,
    tol: f64,
    seed: u64,
) -> SupportCheck {
    let mut rng = stream(seed, tags::SUPPORT_CHECK, 0);
    let big_h = |x: &[f64]| {
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if r == 0.0 {
            return 0.0;
        }
        let u: Vec<f64> = x.iter().map(|v| v / r).collect();
        r * h(&u)
    };
    let mut max_violation = f64::NEG_INFINITY;
    let mut witness = None;
    for _ in 0..trials {
        let x = gaussian_vector(n, &mut rng);
        let y = gaussian_vector(n, &mut rng);
        let s = &x + &y;
        let lhs = big_h(s.as_slice());
        let rhs = big_h(x.as_slice()) + big_h(y.as_slice());
        let gap = lhs - rhs;
        if gap > max_violation {
            max_violation = gap;
        }
        if gap > tol && witness.is_none() {
            witness = Some(SublinearityWitness {
                x: x.as_slice().to_vec(),
                y: y.as_slice().to_vec(),
                lhs,
                rhs,
            });
        }
    }
    SupportCheck {
        holds: witness.is_none(),
        trials,
        tolerance: tol,
        max_violation,
        witness,
    }
}

/// Tests whether the tabulated `f` extends to a sublinear function.
pub fn is_support_function(
    f: &SphericalFunction,
    trials: usize,
    tol: f64,
    seed: u64,
) -> Result<SupportCheck> {
    if trials < MIN_TRIALS {
        return invalid(format!(
            "at least {MIN_TRIALS} trials are required, got {trials}"
        ));
    }
    Ok(check_sublinear(f.dim(), |u| f.eval(u), trials, tol, seed))
}
