//! Crofton measures on `Gr_{i,n}` and the valuations they generate.

use std::sync::Arc;

use rayon::prelude::*;

use crate::consts::{binom, kappa};
use crate::error::{invalid, Result};
use crate::geometry::{project_volume, Polytope};
use crate::grassmann::sample::node_seed;
use crate::grassmann::{
    cosine, rotation_mapping_pole, sample_grassmann, stratified_subspaces, GrassmannSample,
    Subspace,
};
use crate::linalg::Mat;
use crate::rng::tags;
use crate::sphere::{EstimatedFunction, SphereGrid};
use crate::stats::Estimate;

/// A signed measure on `Gr_{i,n}` given by a weighted subspace sample.
///
/// With `symmetrize` set, every evaluation at a node `u` uses a fresh
/// seeded rotation `η_u` with `η_u e_1 = u`, so that the measure acts as if
/// it were invariant under the stabilizer of `e_1`.
#[derive(Debug, Clone)]
pub struct CroftonMeasure {
    sample: Arc<GrassmannSample>,
    pub symmetrize: bool,
    pub seed: u64,
}

impl CroftonMeasure {
    pub fn new(sample: GrassmannSample, symmetrize: bool, seed: u64) -> Self {
        Self {
            sample: Arc::new(sample),
            symmetrize,
            seed,
        }
    }

    /// `count` uniform subspaces with total mass one.
    pub fn uniform(n: usize, i: usize, count: usize, seed: u64) -> Result<Self> {
        Ok(Self::new(sample_grassmann(n, i, count, seed)?, true, seed))
    }

    /// The measure realizing `Π_i`: `i`-subspaces of `e_1^⊥` with total mass
    /// `C(n-1, i) κ_{n-1} / (κ_{n-1-i} κ_i)`, so that
    /// `Σ_j w_j vol_i(K | η_u E_j) = V_i(K | u^⊥)` in expectation.
    pub fn projection_body(n: usize, i: usize, count: usize, seed: u64) -> Result<Self> {
        if i == 0 || i >= n {
            return invalid(format!("Π_i needs 1 ≤ i ≤ n-1, got i = {i}"));
        }
        let mass = pi_i_constant(n, i);
        let frames = stratified_subspaces(n - 1, i, count);
        let w = mass / frames.len() as f64;
        let subspaces = frames
            .into_iter()
            .map(|f| {
                let mut full = Mat::zeros(n, i);
                full.view_mut((1, 0), (n - 1, i)).copy_from(&f);
                Subspace::new(full)
            })
            .collect::<Result<Vec<_>>>()?;
        let weights = vec![w; subspaces.len()];
        Ok(Self::new(
            GrassmannSample::new(subspaces, weights)?,
            true,
            seed,
        ))
    }

    pub fn sample(&self) -> &GrassmannSample {
        &self.sample
    }

    pub fn n(&self) -> usize {
        self.sample.n()
    }

    pub fn degree(&self) -> usize {
        self.sample.i()
    }

    /// The rotation used at node `k` with pole image `u`.
    pub fn node_rotation(&self, u: &[f64], k: usize) -> Mat {
        let seed = if self.symmetrize {
            node_seed(self.seed, tags::CROFTON, k)
        } else {
            self.seed
        };
        rotation_mapping_pole(u, seed)
    }

    /// `φ(K) = ∫ vol_i(K | E) dσ(E)`.
    pub fn value(&self, k: &Polytope) -> Result<Estimate> {
        crofton_value(self, k)
    }
}

/// `C(n-1, i) κ_{n-1} / (κ_{n-1-i} κ_i)`, the Kubota constant for `V_i` in
/// dimension `n - 1`.
pub fn pi_i_constant(n: usize, i: usize) -> f64 {
    binom(n - 1, i) * kappa(n - 1) / (kappa(n - 1 - i) * kappa(i))
}

fn weighted_projection_sum(
    sigma: &GrassmannSample,
    k: &Polytope,
    rotation: Option<&Mat>,
) -> Result<Estimate> {
    let vals = sigma
        .subspaces()
        .iter()
        .map(|e| match rotation {
            Some(r) => project_volume(k, &e.rotated(r)),
            None => project_volume(k, e),
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(Estimate::from_weighted_terms(sigma.weights(), &vals))
}

/// `∫ vol_i(K | E) dσ(E)` as a weighted sum over the sample.
pub fn crofton_value(sigma: &CroftonMeasure, k: &Polytope) -> Result<Estimate> {
    if k.dim() != sigma.n() {
        return invalid("body and Crofton measure live in different dimensions");
    }
    weighted_projection_sum(&sigma.sample, &k.pruned(), None)
}

/// `h(Φ K, u) = Σ_j w_j vol_i(K | η_u E_j)` at every grid node.
pub fn apply_crofton_minkowski(
    sigma: &CroftonMeasure,
    k: &Polytope,
    grid: Arc<SphereGrid>,
) -> Result<EstimatedFunction> {
    if k.dim() != sigma.n() || grid.dim() != sigma.n() {
        return invalid("body, grid and Crofton measure must share the ambient dimension");
    }
    let k = k.pruned();
    let est = (0..grid.len())
        .into_par_iter()
        .map(|j| {
            let u = grid.node(j);
            weighted_projection_sum(&sigma.sample, &k, Some(&sigma.node_rotation(u, j)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EstimatedFunction::from_estimates(grid, &est))
}

/// The body `L` with `h(L, u) = Σ_j w_j |cos(E_j, η_u^{-1} Ē)|`.
pub fn associated_body(sigma: &CroftonMeasure, grid: Arc<SphereGrid>) -> Result<EstimatedFunction> {
    let (n, i) = (sigma.n(), sigma.degree());
    if grid.dim() != n {
        return invalid("grid and Crofton measure must share the ambient dimension");
    }
    let pole = Subspace::pole(n, i);
    let est = (0..grid.len())
        .into_par_iter()
        .map(|j| {
            let eta = sigma.node_rotation(grid.node(j), j);
            let target = pole.rotated(&eta.transpose());
            let vals = sigma
                .sample
                .subspaces()
                .iter()
                .map(|e| cosine(e, &target))
                .collect::<Result<Vec<f64>>>()?;
            Ok(Estimate::from_weighted_terms(sigma.sample.weights(), &vals))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EstimatedFunction::from_estimates(grid, &est))
}
