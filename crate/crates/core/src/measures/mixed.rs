//! Mixed quermassintegrals from area measures, and the polynomial oracle for
//! mixed volumes.

use super::area::{area_measure, AreaOptions};
use super::atomic::AtomicMeasure;
use crate::consts::binom;
use crate::error::{invalid, Result};
use crate::geometry::{BodyHandle, Polytope};
use crate::linalg::Mat;

/// `(1/n) ∫ h dS` for an area measure `S` of order `i`: the mixed
/// quermassintegral `W_{n-1-i}(K, L)` when `h = h(L, ·)`.
pub fn mixed_quermass_with(measure: &AtomicMeasure, h: impl Fn(&[f64]) -> f64) -> f64 {
    measure.integrate(h) / measure.dim() as f64
}

/// `W_{n-1-i}(K, L) = (1/n) ∫ h(L, u) dS_i(K, u)`.
pub fn mixed_quermass_pair(
    k: &Polytope,
    l: &BodyHandle,
    i: usize,
    opts: &AreaOptions,
) -> Result<f64> {
    if i == 0 || i >= k.dim() {
        return invalid(format!(
            "mixed quermassintegral order {i} outside 1..{}",
            k.dim()
        ));
    }
    if l.dim() != k.dim() {
        return invalid("bodies live in different dimensions");
    }
    let s = area_measure(k, i, opts)?;
    Ok(mixed_quermass_with(&s, |u| l.support(u)))
}

/// Coefficients of `V(λK + μL) = Σ_j C(n, j) λ^{n-j} μ^j V(K[n-j], L[j])`.
#[derive(Debug, Clone)]
pub struct MixedVolumeFit {
    /// `V(K[n-j], L[j])` for `j = 0, …, n`.
    pub coefficients: Vec<f64>,
    /// Largest residual relative to the largest sampled volume.
    pub residual: f64,
}

/// Fits the mixed volumes of `K` and `L` to hull volumes of `λK + μL` on an
/// `(n+1) × (n+1)` grid of coefficients.
pub fn mixed_volume_fit(k: &Polytope, l: &Polytope) -> Result<MixedVolumeFit> {
    let n = k.dim();
    if l.dim() != n {
        return invalid("bodies live in different dimensions");
    }
    let (k, l) = (k.pruned(), l.pruned());
    let levels: Vec<f64> = (0..=n).map(|a| 0.5 + 0.5 * a as f64).collect();
    let mut rows = Vec::new();
    let mut vols = Vec::new();
    for &lam in &levels {
        for &mu in &levels {
            let mut pts = Vec::with_capacity(k.len() * l.len() * n);
            for a in k.vertices() {
                for b in l.vertices() {
                    pts.extend(a.iter().zip(b).map(|(x, y)| lam * x + mu * y));
                }
            }
            vols.push(crate::geometry::hull_volume(&pts, n));
            rows.push(
                (0..=n)
                    .map(|j| binom(n, j) * lam.powi((n - j) as i32) * mu.powi(j as i32))
                    .collect::<Vec<_>>(),
            );
        }
    }
    let a = Mat::from_fn(rows.len(), n + 1, |r, c| rows[r][c]);
    let y = nalgebra::DVector::from_vec(vols.clone());
    let x = a
        .clone()
        .svd(true, true)
        .solve(&y, 1e-14)
        .map_err(|e| crate::Error::Conditioning(e.to_string()))?;
    let fitted = &a * &x;
    let scale = vols.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let residual = (fitted - y).amax() / scale;
    Ok(MixedVolumeFit {
        coefficients: x.iter().copied().collect(),
        residual,
    })
}
