//! Measures on `O(n)` and the group-level convolution
//! `(f ∗ μ)(η) = ∫ f(η ϑ^{-1}) dμ(ϑ)`, kept as a reference path for the
//! sphere and Grassmann reductions.

use rand::Rng as _;

use super::sample::{rotation_mapping_pole, stratified_subspaces};
use super::subspace::Subspace;
use crate::error::{invalid, Result};
use crate::linalg::{haar_orthogonal, Mat};
use crate::rng::{derive_seed, stream, tags};
use crate::stats::{pairwise_sum, Estimate};

/// A finite signed measure on `O(n)` given by weighted orthogonal matrices.
#[derive(Debug, Clone)]
pub struct RotationSample {
    n: usize,
    rotations: Vec<Mat>,
    weights: Vec<f64>,
}

impl RotationSample {
    pub fn new(rotations: Vec<Mat>, weights: Vec<f64>) -> Result<Self> {
        if rotations.is_empty() || rotations.len() != weights.len() {
            return invalid("a rotation sample needs one weight per rotation");
        }
        let n = rotations[0].nrows();
        for r in &rotations {
            if r.shape() != (n, n) || (r.transpose() * r - Mat::identity(n, n)).abs().max() > 1e-10
            {
                return invalid("rotation sample entries must be orthogonal n × n matrices");
            }
        }
        Ok(Self {
            n,
            rotations,
            weights,
        })
    }

    /// `count` Haar-distributed elements with equal weights.
    pub fn haar(n: usize, count: usize, seed: u64) -> Self {
        let rotations = (0..count)
            .map(|k| haar_orthogonal(n, &mut stream(seed, tags::ROTATION, k as u64)))
            .collect();
        Self {
            n,
            rotations,
            weights: vec![1.0 / count as f64; count],
        }
    }

    /// The unit mass at the identity.
    pub fn identity(n: usize) -> Self {
        Self {
            n,
            rotations: vec![Mat::identity(n, n)],
            weights: vec![1.0],
        }
    }

    /// Lift of a measure on the sphere: each atom `v` becomes `η_v h` with
    /// `η_v e_1 = v` and `h` a seeded random element of the stabilizer.
    pub fn lift_sphere(directions: &[Vec<f64>], weights: &[f64], seed: u64) -> Result<Self> {
        if directions.is_empty() || directions.len() != weights.len() {
            return invalid("a sphere measure needs one weight per direction");
        }
        let rotations = directions
            .iter()
            .enumerate()
            .map(|(k, v)| rotation_mapping_pole(v, derive_seed(seed, tags::LIFT, k as u64)))
            .collect();
        Self::new(rotations, weights.to_vec())
    }

    /// The probability measure uniformly concentrated on the great subsphere
    /// `S^{i-1} = S^{n-1} ∩ span{e_1, …, e_i}`, lifted to `O(n)`.
    pub fn subsphere(n: usize, i: usize, count: usize, seed: u64) -> Result<Self> {
        if i == 0 || i > n || i > 3 {
            return invalid(format!(
                "subsphere of dimension {i} is not supported in R^{n}"
            ));
        }
        let dirs: Vec<Vec<f64>> = if i == 1 {
            vec![vec![1.0]; count]
        } else {
            // Lines through a stratified set, both orientations.
            let lines = stratified_subspaces(i, 1, count.div_ceil(2));
            lines
                .iter()
                .flat_map(|l| {
                    [
                        l.column(0).iter().copied().collect::<Vec<_>>(),
                        l.column(0).iter().map(|x| -x).collect(),
                    ]
                })
                .collect()
        };
        let dirs: Vec<Vec<f64>> = dirs
            .into_iter()
            .map(|d| {
                let mut v = vec![0.0; n];
                v[..i].copy_from_slice(&d);
                v
            })
            .collect();
        let w = vec![1.0 / dirs.len() as f64; dirs.len()];
        Self::lift_sphere(&dirs, &w, seed)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.rotations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rotations.is_empty()
    }

    pub fn rotations(&self) -> &[Mat] {
        &self.rotations
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total_mass(&self) -> f64 {
        pairwise_sum(&self.weights)
    }

    /// Pushforward under `ϑ ↦ ϑ^{-1}`.
    pub fn hat(&self) -> Self {
        Self {
            n: self.n,
            rotations: self.rotations.iter().map(|r| r.transpose()).collect(),
            weights: self.weights.clone(),
        }
    }

    /// `∫ F dμ` with the standard error of the weighted sum.
    pub fn integrate(&self, f: impl Fn(&Mat) -> f64) -> Estimate {
        let vals: Vec<f64> = self.rotations.iter().map(f).collect();
        Estimate::from_weighted_terms(&self.weights, &vals)
    }
}

/// `(f ∗ μ)(η) = Σ_k w_k f(η ϑ_k^{-1} e_1)` for a function on the sphere.
pub fn lifted_convolve_sphere(
    f: &dyn Fn(&[f64]) -> f64,
    mu: &RotationSample,
    eta: &Mat,
) -> Estimate {
    mu.integrate(|r| {
        // η ϑ^{-1} e_1 is η times the first row of ϑ.
        let row: Vec<f64> = r.row(0).iter().copied().collect();
        let v = eta * nalgebra::DVector::from_vec(row);
        f(v.as_slice())
    })
}

/// `(f ∗ μ)(η) = Σ_k w_k f(η ϑ_k^{-1} Ē)` for a function on `Gr_{i,n}`.
pub fn lifted_convolve_grassmann(
    f: &dyn Fn(&Subspace) -> f64,
    i: usize,
    mu: &RotationSample,
    eta: &Mat,
) -> Estimate {
    let pole = Subspace::pole(mu.n(), i);
    mu.integrate(|r| f(&pole.rotated(&(eta * r.transpose()))))
}

/// `μ ∗ σ`: the pushforward of `μ ⊗ σ` under multiplication, with all
/// `|μ|·|σ|` products.
pub fn convolve_measures(mu: &RotationSample, sigma: &RotationSample) -> RotationSample {
    let mut rotations = Vec::with_capacity(mu.len() * sigma.len());
    let mut weights = Vec::with_capacity(mu.len() * sigma.len());
    for (a, wa) in mu.rotations.iter().zip(&mu.weights) {
        for (b, wb) in sigma.rotations.iter().zip(&sigma.weights) {
            rotations.push(a * b);
            weights.push(wa * wb);
        }
    }
    RotationSample {
        n: mu.n,
        rotations,
        weights,
    }
}

/// Unbiased sampled version of [`convolve_measures`]: `pairs` index pairs
/// drawn uniformly, each reweighted by `|μ|·|σ|·w_a·w_b / pairs`.
pub fn convolve_measures_sampled(
    mu: &RotationSample,
    sigma: &RotationSample,
    pairs: usize,
    seed: u64,
) -> RotationSample {
    let mut rng = stream(seed, tags::ROTATION, u64::MAX);
    let scale = (mu.len() * sigma.len()) as f64 / pairs as f64;
    let mut rotations = Vec::with_capacity(pairs);
    let mut weights = Vec::with_capacity(pairs);
    for _ in 0..pairs {
        let a = rng.random_range(0..mu.len());
        let b = rng.random_range(0..sigma.len());
        rotations.push(&mu.rotations[a] * &sigma.rotations[b]);
        weights.push(scale * mu.weights[a] * sigma.weights[b]);
    }
    RotationSample {
        n: mu.n,
        rotations,
        weights,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random_unit;

    #[test]
    fn dirac_lift_reproduces_sphere_function() {
        let f = |v: &[f64]| v[0] + 2.0 * v[1] * v[2];
        let dirac =
            RotationSample::lift_sphere(&vec![vec![1.0, 0.0, 0.0]; 5], &[0.2; 5], 3).unwrap();
        let mut rng = stream(1, 0, 0);
        for _ in 0..10 {
            let u = random_unit(3, &mut rng);
            let eta = rotation_mapping_pole(u.as_slice(), 4);
            let e = lifted_convolve_sphere(&f, &dirac, &eta);
            assert!((e.value - f(u.as_slice())).abs() < 1e-12);
        }
    }

    #[test]
    fn hat_is_an_anti_homomorphism() {
        let mu = RotationSample::haar(3, 4, 1);
        let sigma = RotationSample::haar(3, 5, 2);
        let lhs = convolve_measures(&mu, &sigma).hat();
        let rhs = convolve_measures(&sigma.hat(), &mu.hat());
        // Same multiset of products, in a different order.
        let test = |r: &Mat| r[(0, 1)] + r[(2, 2)].powi(2);
        let (a, b) = (lhs.integrate(test), rhs.integrate(test));
        assert!((a.value - b.value).abs() < 1e-12);
    }

    #[test]
    fn subsphere_measure_is_a_probability() {
        let m = RotationSample::subsphere(4, 2, 10, 1).unwrap();
        assert!((m.total_mass() - 1.0).abs() < 1e-12);
        for r in m.rotations() {
            assert!(r[(2, 0)].abs() < 1e-12 && r[(3, 0)].abs() < 1e-12);
        }
    }
}
