//! Weighted quadrature grids on `S^{n-1}` for `n ∈ {3, 4}`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use nalgebra::DVector;
use rand::Rng as _;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::interp::Interpolator;
use crate::error::{invalid, Error, Result};
use crate::linalg::{haar_orthogonal, random_unit};
use crate::rng::{stream, tags};
use crate::stats::{pairwise_sum, Estimate};

/// Smallest node count accepted by [`build_sphere_grid`].
pub const MIN_NODES: usize = 100;

/// Second constant of the super-Fibonacci spiral on `S^3`.
const SUPER_FIBONACCI_PSI: f64 = 1.533_751_168_755_204_3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridKind {
    Fibonacci,
    QuasiRandom,
    MonteCarlo,
}

impl std::str::FromStr for GridKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fibonacci" => Ok(Self::Fibonacci),
            "quasi_random" | "quasi-random" => Ok(Self::QuasiRandom),
            "monte_carlo" | "monte-carlo" => Ok(Self::MonteCarlo),
            _ => invalid(format!("unknown grid kind `{s}`")),
        }
    }
}

/// Nodes and weights approximating the rotation invariant probability
/// measure on the sphere.
#[derive(Debug)]
pub struct SphereGrid {
    dim: usize,
    id: String,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    interp: OnceLock<Interpolator>,
}

impl Clone for SphereGrid {
    fn clone(&self) -> Self {
        Self {
            dim: self.dim,
            id: self.id.clone(),
            nodes: self.nodes.clone(),
            weights: self.weights.clone(),
            interp: OnceLock::new(),
        }
    }
}

impl PartialEq for SphereGrid {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.nodes == other.nodes && self.weights == other.weights
    }
}

#[derive(Serialize, Deserialize)]
struct GridFile {
    dim: usize,
    nodes: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

fn halton(mut index: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while index > 0 {
        f /= base as f64;
        r += f * (index % base) as f64;
        index /= base;
    }
    r
}

/// Area-preserving map from the unit square (cube) onto `S^2` (`S^3`).
fn square_to_sphere(n: usize, u: &[f64]) -> Vec<f64> {
    if n == 3 {
        let z = 1.0 - 2.0 * u[0];
        let r = (1.0 - z * z).max(0.0).sqrt();
        let phi = 2.0 * PI * u[1];
        vec![r * phi.cos(), r * phi.sin(), z]
    } else {
        let (a, b) = ((1.0 - u[0]).sqrt(), u[0].sqrt());
        let (t1, t2) = (2.0 * PI * u[1], 2.0 * PI * u[2]);
        vec![a * t1.sin(), a * t1.cos(), b * t2.sin(), b * t2.cos()]
    }
}

fn fibonacci_nodes(n: usize, count: usize) -> Vec<Vec<f64>> {
    let nf = count as f64;
    if n == 3 {
        let golden = (1.0 + 5f64.sqrt()) / 2.0;
        (0..count)
            .map(|k| {
                let z = 1.0 - (2 * k + 1) as f64 / nf;
                let r = (1.0 - z * z).max(0.0).sqrt();
                let phi = 2.0 * PI * (k as f64 / golden).fract();
                vec![r * phi.cos(), r * phi.sin(), z]
            })
            .collect()
    } else {
        let phi = 2f64.sqrt();
        (0..count)
            .map(|k| {
                let s = k as f64 + 0.5;
                let (r, big_r) = ((s / nf).sqrt(), (1.0 - s / nf).sqrt());
                let alpha = 2.0 * PI * s / phi;
                let beta = 2.0 * PI * s / SUPER_FIBONACCI_PSI;
                vec![
                    r * alpha.sin(),
                    r * alpha.cos(),
                    big_r * beta.sin(),
                    big_r * beta.cos(),
                ]
            })
            .collect()
    }
}

fn normalize(v: &mut [f64]) {
    let r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= r);
}

/// Builds a grid of `node_count` nodes with uniform weights. Fibonacci
/// grids are rotated by a seeded random rotation; quasi-random grids use a
/// Halton sequence with a seeded Cranley–Patterson shift.
pub fn build_sphere_grid(
    n: usize,
    node_count: usize,
    kind: GridKind,
    seed: u64,
) -> Result<SphereGrid> {
    if n != 3 && n != 4 {
        return Err(Error::UnsupportedDimension(n));
    }
    if node_count < MIN_NODES {
        return invalid(format!(
            "node count {node_count} is below the minimum of {MIN_NODES}"
        ));
    }
    let mut rng = stream(seed, tags::GRID, 0);
    let nodes: Vec<Vec<f64>> = match kind {
        GridKind::Fibonacci => {
            let q = haar_orthogonal(n, &mut rng);
            fibonacci_nodes(n, node_count)
                .into_iter()
                .map(|v| {
                    let mut w: Vec<f64> = (&q * DVector::from_vec(v)).iter().copied().collect();
                    normalize(&mut w);
                    w
                })
                .collect()
        }
        GridKind::QuasiRandom => {
            let shift: Vec<f64> = (0..n - 1).map(|_| rng.random::<f64>()).collect();
            let bases = [2, 3, 5];
            (0..node_count)
                .map(|k| {
                    let u: Vec<f64> = (0..n - 1)
                        .map(|c| (halton(k as u64 + 1, bases[c]) + shift[c]).fract())
                        .collect();
                    let mut v = square_to_sphere(n, &u);
                    normalize(&mut v);
                    v
                })
                .collect()
        }
        GridKind::MonteCarlo => (0..node_count)
            .map(|_| random_unit(n, &mut rng).iter().copied().collect())
            .collect(),
    };
    let tag = match kind {
        GridKind::Fibonacci => "fibonacci",
        GridKind::QuasiRandom => "quasi_random",
        GridKind::MonteCarlo => "monte_carlo",
    };
    Ok(SphereGrid {
        dim: n,
        id: format!("{tag}-n{n}-{node_count}-s{seed}"),
        nodes: nodes.into_iter().flatten().collect(),
        weights: vec![1.0 / node_count as f64; node_count],
        interp: OnceLock::new(),
    })
}

impl SphereGrid {
    /// A grid from explicit nodes and weights; weights are rescaled to sum
    /// to one.
    pub fn from_parts(dim: usize, nodes: Vec<Vec<f64>>, weights: Vec<f64>) -> Result<Self> {
        if dim != 3 && dim != 4 {
            return Err(Error::UnsupportedDimension(dim));
        }
        if nodes.len() != weights.len() || nodes.is_empty() {
            return invalid("grid needs one positive weight per node");
        }
        for v in &nodes {
            if v.len() != dim {
                return invalid("grid node has the wrong dimension");
            }
            let r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if (r - 1.0).abs() > 1e-12 {
                return invalid("grid node is not a unit vector");
            }
        }
        if weights.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
            return invalid("grid weights must be positive");
        }
        let total = pairwise_sum(&weights);
        let weights: Vec<f64> = if (total - 1.0).abs() > 1e-12 {
            weights.iter().map(|w| w / total).collect()
        } else {
            weights
        };
        let flat: Vec<f64> = nodes.into_iter().flatten().collect();
        let mut hasher = Sha256::new();
        for x in flat.iter().chain(&weights) {
            hasher.update(x.to_le_bytes());
        }
        let id = format!("grid-{}", &hex::encode(hasher.finalize())[..16]);
        Ok(Self {
            dim,
            id,
            nodes: flat,
            weights,
            interp: OnceLock::new(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn node(&self, k: usize) -> &[f64] {
        &self.nodes[k * self.dim..(k + 1) * self.dim]
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = &[f64]> {
        self.nodes.chunks_exact(self.dim)
    }

    pub fn flat_nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Typical spacing between neighbouring nodes.
    pub fn spacing(&self) -> f64 {
        let area = crate::consts::omega(self.dim);
        (area / self.len() as f64).powf(1.0 / (self.dim - 1) as f64)
    }

    /// Quadrature of tabulated values, normalized by the weight sum so that
    /// constants integrate exactly.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        let terms: Vec<f64> = self
            .weights
            .iter()
            .zip(values)
            .map(|(w, v)| w * v)
            .collect();
        pairwise_sum(&terms) / pairwise_sum(&self.weights)
    }

    pub fn integrate_fn(&self, f: impl Fn(&[f64]) -> f64) -> f64 {
        let values: Vec<f64> = self.nodes().map(f).collect();
        self.integrate(&values)
    }

    /// Quadrature with the i.i.d. standard error `σ̂/√N` of the integrand.
    pub fn estimate(&self, values: &[f64]) -> Estimate {
        Estimate::from_weighted_terms(&self.weights, values)
    }

    pub(crate) fn interpolator(&self) -> &Interpolator {
        self.interp.get_or_init(|| Interpolator::build(self))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let file = GridFile {
            dim: self.dim,
            nodes: self.nodes().map(|v| v.to_vec()).collect(),
            weights: self.weights.clone(),
        };
        serde_json::to_value(file).expect("grid serializes")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let file: GridFile = serde_json::from_value(value.clone())?;
        Self::from_parts(file.dim, file.nodes, file.weights)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_integrate_exactly() {
        for kind in [
            GridKind::Fibonacci,
            GridKind::QuasiRandom,
            GridKind::MonteCarlo,
        ] {
            for n in [3, 4] {
                let g = build_sphere_grid(n, 1000, kind, 3).unwrap();
                assert_eq!(g.integrate_fn(|_| 1.0), 1.0);
                assert!((pairwise_sum(g.weights()) - 1.0).abs() < 1e-12);
                for v in g.nodes() {
                    let r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                    assert!((r - 1.0).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn odd_moments_vanish() {
        for kind in [
            GridKind::Fibonacci,
            GridKind::QuasiRandom,
            GridKind::MonteCarlo,
        ] {
            let g = build_sphere_grid(3, 2000, kind, 1).unwrap();
            let m = g.integrate_fn(|u| u[0]);
            assert!(m.abs() < 3.0 / (2000f64).sqrt(), "{kind:?}: {m}");
        }
    }

    #[test]
    fn second_moment_is_one_third() {
        let g = build_sphere_grid(3, 5000, GridKind::Fibonacci, 2).unwrap();
        assert!((g.integrate_fn(|u| u[0] * u[0]) - 1.0 / 3.0).abs() < 1e-3);
        let g4 = build_sphere_grid(4, 5000, GridKind::Fibonacci, 2).unwrap();
        assert!((g4.integrate_fn(|u| u[0] * u[0]) - 0.25).abs() < 2e-3);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(matches!(
            build_sphere_grid(5, 1000, GridKind::Fibonacci, 0),
            Err(Error::UnsupportedDimension(5))
        ));
        assert!(build_sphere_grid(3, 10, GridKind::Fibonacci, 0).is_err());
    }

    #[test]
    fn deterministic_in_seed() {
        let a = build_sphere_grid(3, 200, GridKind::MonteCarlo, 4).unwrap();
        let b = build_sphere_grid(3, 200, GridKind::MonteCarlo, 4).unwrap();
        let c = build_sphere_grid(3, 200, GridKind::MonteCarlo, 5).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn json_round_trip() {
        let g = build_sphere_grid(4, 150, GridKind::QuasiRandom, 8).unwrap();
        let back = SphereGrid::from_json(&g.to_json()).unwrap();
        assert_eq!(g, back);
    }
}
