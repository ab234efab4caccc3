//! Quermassintegrals by three independent routes: a polynomial fit of
//! `V(K + εB)`, Kubota averaging of projection volumes, and exact face sums.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::consts::{binom, kappa};
use crate::error::{invalid, Error, Result};
use crate::geometry::{convex_hull, hull_volume, project_volume, BodyHandle, Polytope};
use crate::grassmann::GrassmannSample;
use crate::linalg::Mat;
use crate::sphere::{build_sphere_grid, GridKind};
use crate::stats::Estimate;

/// Fits whose design matrix exceeds this condition number are rejected.
pub const MAX_CONDITION: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuermassSource {
    SteinerFit,
    Kubota,
    Exact,
}

/// `W_0, …, W_n` with per-entry standard errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuermassVector {
    pub values: Vec<f64>,
    pub se: Vec<f64>,
    pub source: QuermassSource,
    /// Hausdorff distance between the unit ball and its polytopal stand-in,
    /// zero when no stand-in was used.
    pub ball_error: f64,
}

impl QuermassVector {
    pub fn dim(&self) -> usize {
        self.values.len() - 1
    }

    /// `W_j`.
    pub fn w(&self, j: usize) -> f64 {
        self.values[j]
    }

    /// `V_i = C(n, i) W_{n-i} / κ_{n-i}`.
    pub fn intrinsic(&self, i: usize) -> f64 {
        let n = self.dim();
        binom(n, i) * self.values[n - i] / kappa(n - i)
    }

    /// Quermassintegrals from intrinsic volumes `V_0, …, V_n`.
    pub fn from_intrinsic(v: &[f64], source: QuermassSource) -> Self {
        let n = v.len() - 1;
        let values = (0..=n).map(|j| kappa(j) * v[n - j] / binom(n, j)).collect();
        Self {
            values,
            se: vec![0.0; n + 1],
            source,
            ball_error: 0.0,
        }
    }
}

/// Exact quermassintegrals from the face lattice.
pub fn quermass_exact(p: &Polytope) -> QuermassVector {
    QuermassVector::from_intrinsic(&p.intrinsic_volumes(), QuermassSource::Exact)
}

/// A polytope inscribed in the unit sphere on a Fibonacci point set,
/// rescaled to the volume of the unit ball, and its Hausdorff distance to
/// the ball.
pub fn polytopal_ball(n: usize, count: usize) -> Result<(Polytope, f64)> {
    let grid = build_sphere_grid(n, count, GridKind::Fibonacci, 0)?;
    let coords = grid.flat_nodes().to_vec();
    let hull =
        convex_hull(&coords, n).ok_or_else(|| Error::DegenerateBody("ball point set".into()))?;
    let inradius = hull
        .facets
        .iter()
        .map(|f| f.offset)
        .fold(f64::INFINITY, f64::min);
    let s = (kappa(n) / hull.volume(&coords)).powf(1.0 / n as f64);
    let delta = (s - 1.0).max(1.0 - s * inradius);
    let kept: Vec<f64> = hull
        .vertices
        .iter()
        .flat_map(|&k| coords[k * n..(k + 1) * n].iter().map(|x| s * x))
        .collect();
    Ok((Polytope::from_flat(kept, n)?, delta))
}

#[derive(Debug, Clone)]
pub struct SteinerFitOptions {
    pub epsilons: Vec<f64>,
    pub ball_nodes: usize,
}

impl Default for SteinerFitOptions {
    fn default() -> Self {
        Self {
            epsilons: (1..=10).map(|k| 0.1 * k as f64).collect(),
            ball_nodes: 2000,
        }
    }
}

/// `V(K + εB)`, with `B` replaced by `ball` for polytopes.
fn parallel_volume(body: &BodyHandle, eps: f64, ball: &Polytope) -> Result<f64> {
    match body {
        BodyHandle::Ball(b) => {
            Ok(kappa(b.center.len()) * (b.radius + eps).powi(b.center.len() as i32))
        }
        BodyHandle::Polytope(p) => {
            let n = p.dim();
            let p = p.pruned();
            let mut pts = Vec::with_capacity(p.len() * ball.len() * n);
            for v in p.vertices() {
                for q in ball.vertices() {
                    pts.extend(v.iter().zip(q).map(|(a, b)| a + eps * b));
                }
            }
            Ok(hull_volume(&pts, n))
        }
        BodyHandle::Support(s) => parallel_volume(
            &BodyHandle::Polytope(s.circumscribed_polytope()?),
            eps,
            ball,
        ),
    }
}

/// Least-squares fit of `V(K + εB) = Σ_j C(n, j) W_j ε^j`.
pub fn quermass_steiner_fit(body: &BodyHandle, opts: &SteinerFitOptions) -> Result<QuermassVector> {
    let n = body.dim();
    let eps = &opts.epsilons;
    let mut distinct = eps.clone();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < n + 1 || eps.iter().any(|e| !(*e > 0.0)) {
        return invalid(format!(
            "the Steiner fit needs at least {} distinct positive radii",
            n + 1
        ));
    }
    let (ball, delta) = match body {
        BodyHandle::Ball(_) => (Polytope::from_flat(vec![0.0; n], n)?, 0.0),
        _ => polytopal_ball(n, opts.ball_nodes)?,
    };
    let volumes: Vec<f64> = eps
        .par_iter()
        .map(|&e| parallel_volume(body, e, &ball))
        .collect::<Result<_>>()?;
    let a = Mat::from_fn(eps.len(), n + 1, |r, j| binom(n, j) * eps[r].powi(j as i32));
    // Column equilibration before judging the conditioning.
    let norms: Vec<f64> = (0..=n).map(|j| a.column(j).norm()).collect();
    let scaled = Mat::from_fn(eps.len(), n + 1, |r, j| a[(r, j)] / norms[j]);
    let svd = scaled.clone().svd(true, true);
    let sv = &svd.singular_values;
    let cond = sv.max() / sv.min();
    if !(cond <= MAX_CONDITION) {
        return Err(Error::Conditioning(format!(
            "Steiner fit condition number {cond:.3e}"
        )));
    }
    let y = nalgebra::DVector::from_vec(volumes);
    let x = svd
        .solve(&y, 1e-14)
        .map_err(|e| Error::Conditioning(e.to_string()))?;
    let values: Vec<f64> = (0..=n).map(|j| x[j] / norms[j]).collect();
    Ok(QuermassVector {
        values,
        se: vec![0.0; n + 1],
        source: QuermassSource::SteinerFit,
        ball_error: delta,
    })
}

/// `W_{n-i}(K) = κ_n / κ_i · ∫ vol_i(K | E) dE` over a weighted sample of
/// `Gr_{i,n}`.
pub fn quermass_kubota(p: &Polytope, i: usize, sample: &GrassmannSample) -> Result<Estimate> {
    let n = p.dim();
    if sample.n() != n || sample.i() != i || i == 0 || i >= n {
        return invalid(format!("Kubota average needs a sample of Gr_{{{i},{n}}}"));
    }
    let p = p.pruned();
    let vals: Vec<f64> = sample
        .subspaces()
        .par_iter()
        .map(|e| project_volume(&p, e))
        .collect::<Result<_>>()?;
    Ok(Estimate::from_weighted_terms(sample.weights(), &vals).scale(kappa(n) / kappa(i)))
}

/// All quermassintegrals by the Kubota route, with exact `W_0` and `W_n`.
pub fn quermass_vector_kubota(p: &Polytope, samples: usize, seed: u64) -> Result<QuermassVector> {
    let n = p.dim();
    let mut values = vec![0.0; n + 1];
    let mut se = vec![0.0; n + 1];
    values[0] = p.volume();
    values[n] = kappa(n);
    for i in 1..n {
        let sample = crate::grassmann::sample_grassmann(
            n,
            i,
            samples,
            crate::rng::derive_seed(seed, i as u64, 0),
        )?;
        let e = quermass_kubota(p, i, &sample)?;
        values[n - i] = e.value;
        se[n - i] = e.se;
    }
    Ok(QuermassVector {
        values,
        se,
        source: QuermassSource::Kubota,
        ball_error: 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Ball;
    use crate::grassmann::sample_grassmann;
    use std::f64::consts::PI;

    #[test]
    fn exact_cube_quermassintegrals() {
        let w = quermass_exact(&Polytope::unit_cube(3));
        for (a, b) in w.values.iter().zip([1.0, 2.0, PI, 4.0 * PI / 3.0]) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
        assert!((w.intrinsic(1) - 3.0).abs() < 1e-12 && (w.intrinsic(2) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn steiner_fit_of_cube_and_ball() {
        let w = quermass_steiner_fit(
            &Polytope::unit_cube(3).into(),
            &SteinerFitOptions::default(),
        )
        .unwrap();
        for (a, b) in w.values.iter().zip([1.0, 2.0, PI, 4.0 * PI / 3.0]) {
            assert!((a - b).abs() < 0.01 * b, "{a} vs {b}");
        }
        let b = quermass_steiner_fit(&Ball::unit(3).into(), &SteinerFitOptions::default()).unwrap();
        for a in &b.values {
            assert!((a - kappa(3)).abs() < 1e-9);
        }
    }

    #[test]
    fn fit_rejects_too_few_radii() {
        let opts = SteinerFitOptions {
            epsilons: vec![0.1, 0.2, 0.2, 0.3],
            ..Default::default()
        };
        assert!(quermass_steiner_fit(&Polytope::unit_cube(3).into(), &opts).is_err());
    }

    #[test]
    fn kubota_cube_mean_width() {
        let s = sample_grassmann(3, 1, 4000, 2).unwrap();
        let e = quermass_kubota(&Polytope::unit_cube(3), 1, &s).unwrap();
        assert!((e.value - PI).abs() < 4.0 * e.se, "{} ± {}", e.value, e.se);
    }

    #[test]
    fn polytopal_ball_error_is_small() {
        let (p, delta) = polytopal_ball(3, 2000).unwrap();
        assert!(delta < 2e-3);
        assert!((p.volume() - kappa(3)).abs() < 1e-9);
    }
}
