//! Cosine and Radon transforms.

use std::sync::Arc;

use rayon::prelude::*;

use super::sample::{node_seed, subspaces_containing, GrassmannFunction, GrassmannSample};
use super::subspace::{cosine_unchecked, Subspace};
use crate::error::{invalid, Result};
use crate::rng::tags;
use crate::sphere::{EstimatedFunction, SphereGrid};
use crate::stats::Estimate;

/// `(C_i f)(F) = ∫ |cos(E, F)| f(E) dE` with the integral replaced by the
/// weighted sum over `sample`.
pub fn cosine_transform(
    f: &GrassmannFunction,
    sample: &GrassmannSample,
) -> Result<GrassmannFunction> {
    if f.degree() != sample.i() {
        return invalid("function and sample live on different Grassmannians");
    }
    let values = f.values_on(sample)?;
    let sample = sample.clone();
    Ok(GrassmannFunction::from_fn(sample.i(), move |target| {
        cosine_sum(&sample, &values, target).value
    }))
}

/// Single evaluation of the cosine transform with its standard error.
pub fn cosine_transform_at(
    f: &GrassmannFunction,
    sample: &GrassmannSample,
    target: &Subspace,
) -> Result<Estimate> {
    if f.degree() != sample.i() || target.dim() != sample.i() || target.n() != sample.n() {
        return invalid("function, sample and target must share (n, i)");
    }
    let values = f.values_on(sample)?;
    Ok(cosine_sum(sample, &values, target))
}

fn cosine_sum(sample: &GrassmannSample, values: &[f64], target: &Subspace) -> Estimate {
    let terms: Vec<f64> = sample
        .subspaces()
        .iter()
        .zip(values)
        .map(|(e, v)| cosine_unchecked(e, target) * v)
        .collect();
    Estimate::from_weighted_terms(sample.weights(), &terms)
}

/// `(R_i f)(u)`: the mean of `f` over the `i`-subspaces containing `u`,
/// estimated from `inner_count` stratified subspaces rotated about `u` by a
/// per-node seeded stabilizer.
pub fn radon_to_sphere(
    f: &GrassmannFunction,
    i: usize,
    grid: Arc<SphereGrid>,
    inner_count: usize,
    seed: u64,
) -> Result<EstimatedFunction> {
    let n = grid.dim();
    if i == 0 || i >= n {
        return invalid(format!("Radon transform needs 1 ≤ i ≤ n-1, got i = {i}"));
    }
    if f.degree() != i {
        return invalid("function degree does not match the Radon transform order");
    }
    let est: Vec<Result<Estimate>> = (0..grid.len())
        .into_par_iter()
        .map(|k| {
            let u = grid.node(k);
            let subs = subspaces_containing(u, i, inner_count, node_seed(seed, tags::RADON, k));
            let vals = subs
                .iter()
                .map(|e| f.eval(e))
                .collect::<Result<Vec<f64>>>()?;
            Ok(Estimate::from_samples(&vals))
        })
        .collect();
    let est = est.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(EstimatedFunction::from_estimates(grid, &est))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grassmann::sample::sample_grassmann;
    use crate::grassmann::subspace::cosine;
    use crate::linalg::haar_orthogonal;
    use crate::rng::stream;
    use crate::sphere::{build_sphere_grid, GridKind};

    #[test]
    fn cosine_transform_of_one_on_lines() {
        let s = sample_grassmann(3, 1, 20_000, 3).unwrap();
        let one = GrassmannFunction::constant(1, 1.0);
        let e = cosine_transform_at(&one, &s, &Subspace::pole(3, 1)).unwrap();
        assert!((e.value - 0.5).abs() < 3.0 * e.se + 1e-12);
    }

    #[test]
    fn cosine_transform_is_self_adjoint() {
        let s = sample_grassmann(3, 2, 400, 5).unwrap();
        let t = sample_grassmann(3, 2, 400, 6).unwrap();
        let reference = Subspace::line(&[0.3, 0.4, 0.866]).unwrap();
        let f = GrassmannFunction::from_fn(2, |e| 1.0 + e.frame()[(0, 0)].powi(2));
        let g = GrassmannFunction::from_fn(2, move |e| {
            let p = crate::grassmann::perp(e).unwrap();
            cosine(&p, &reference).unwrap()
        });
        // ⟨C f, g⟩ and ⟨f, C g⟩ as double sums over independent samples.
        let cf = cosine_transform(&f, &s).unwrap();
        let cg = cosine_transform(&g, &s).unwrap();
        let lhs: Vec<f64> = t
            .subspaces()
            .iter()
            .map(|e| cf.eval(e).unwrap() * g.eval(e).unwrap())
            .collect();
        let rhs: Vec<f64> = t
            .subspaces()
            .iter()
            .map(|e| f.eval(e).unwrap() * cg.eval(e).unwrap())
            .collect();
        let (a, b) = (Estimate::from_samples(&lhs), Estimate::from_samples(&rhs));
        assert!((a.value - b.value).abs() < 3.0 * a.combined_se(&b) + 0.02 * a.value.abs());
    }

    #[test]
    fn cosine_transform_is_rotation_equivariant() {
        let s = sample_grassmann(3, 1, 5000, 8).unwrap();
        let rot = haar_orthogonal(3, &mut stream(2, 0, 0));
        let f = GrassmannFunction::from_fn(1, |e| e.frame()[(2, 0)].powi(2));
        let rinv = rot.transpose();
        // (ϑf)(E) = f(ϑ^{-1}E)
        let rf = GrassmannFunction::from_fn(1, move |e| (&rinv * e.frame())[(2, 0)].powi(2));
        let target = Subspace::line(&[0.0, 0.6, 0.8]).unwrap();
        let a = cosine_transform_at(&rf, &s, &target).unwrap();
        let b = cosine_transform_at(&f, &s, &target.rotated(&rot.transpose())).unwrap();
        assert!((a.value - b.value).abs() < 3.0 * a.combined_se(&b) + 1e-3);
    }

    #[test]
    fn radon_of_constant_is_constant() {
        let g = Arc::new(build_sphere_grid(3, 200, GridKind::Fibonacci, 1).unwrap());
        let f = GrassmannFunction::constant(2, 1.5);
        let r = radon_to_sphere(&f, 2, g, 16, 3).unwrap();
        assert!(r.values().iter().all(|v| (v - 1.5).abs() < 1e-15));
    }

    #[test]
    fn radon_is_linear() {
        let g = Arc::new(build_sphere_grid(4, 150, GridKind::Fibonacci, 1).unwrap());
        let f1 = GrassmannFunction::from_fn(2, |e| e.frame()[(0, 0)].abs());
        let f2 = GrassmannFunction::from_fn(2, |e| e.frame()[(1, 1)].powi(2));
        let sum = {
            let (a, b) = (f1.clone(), f2.clone());
            GrassmannFunction::from_fn(2, move |e| 2.0 * a.eval(e).unwrap() + b.eval(e).unwrap())
        };
        let r1 = radon_to_sphere(&f1, 2, g.clone(), 20, 9).unwrap();
        let r2 = radon_to_sphere(&f2, 2, g.clone(), 20, 9).unwrap();
        let rs = radon_to_sphere(&sum, 2, g, 20, 9).unwrap();
        for k in 0..r1.values().len() {
            let lin = 2.0 * r1.values()[k] + r2.values()[k];
            assert!((lin - rs.values()[k]).abs() < 1e-12);
        }
    }
}
