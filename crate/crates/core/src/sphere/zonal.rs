//! Zonal profiles and convolution on the sphere.
//!
//! A zonal measure is stored through its law in `t = ē·v`: an optional
//! density `ρ(t)` against the invariant probability measure plus atoms at
//! fixed heights. Convolution at `u` reduces to
//! `(f ∗ ζ)(u) = ∫ f(v) ρ(u·v) dv + Σ_a w_a · (mean of f on {v : u·v = t_a})`.

use std::fmt;
use std::sync::Arc;

use nalgebra::DVector;
use rayon::prelude::*;

use super::function::{EstimatedFunction, SphericalFunction};
use super::grid::SphereGrid;
use crate::consts::polar_density_constant;
use crate::error::{invalid, Error, Result};
use crate::linalg::orthogonal_complement;
use crate::quadrature::gauss_legendre_on;
use crate::stats::Estimate;

pub type Kernel = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub struct ZonalProfile {
    density: Option<Kernel>,
    /// Interval of `t` outside which the density vanishes.
    support: (f64, f64),
    /// Heights in the interior of `support` where the density has a kink.
    breakpoints: Vec<f64>,
    atoms: Vec<(f64, f64)>,
}

impl fmt::Debug for ZonalProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ZonalProfile")
            .field("density", &self.density.is_some())
            .field("support", &self.support)
            .field("breakpoints", &self.breakpoints)
            .field("atoms", &self.atoms)
            .finish()
    }
}

impl ZonalProfile {
    /// The point mass at the pole.
    pub fn dirac() -> Self {
        Self::from_atoms(vec![(1.0, 1.0)])
    }

    pub fn from_atoms(atoms: Vec<(f64, f64)>) -> Self {
        Self {
            density: None,
            support: (1.0, 1.0),
            breakpoints: Vec::new(),
            atoms,
        }
    }

    /// A density in `t`, vanishing outside `support`, with kinks at
    /// `breakpoints`.
    pub fn from_density(
        density: impl Fn(f64) -> f64 + Send + Sync + 'static,
        support: (f64, f64),
        breakpoints: Vec<f64>,
    ) -> Self {
        let (lo, hi) = (support.0.max(-1.0), support.1.min(1.0));
        let mut breakpoints: Vec<f64> = breakpoints
            .into_iter()
            .filter(|t| *t > lo && *t < hi)
            .collect();
        breakpoints.sort_by(f64::total_cmp);
        Self {
            density: Some(Arc::new(density)),
            support: (lo, hi),
            breakpoints,
            atoms: Vec::new(),
        }
    }

    /// Piecewise linear density through `(ts[k], values[k])`, zero outside
    /// `[ts[0], ts[last]]`.
    pub fn tabulated(ts: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if ts.len() != values.len() || ts.len() < 2 {
            return invalid("tabulated profile needs at least two matching samples");
        }
        if ts.windows(2).any(|w| w[0] >= w[1]) || ts[0] < -1.0 || ts[ts.len() - 1] > 1.0 {
            return invalid("profile heights must increase within [-1, 1]");
        }
        let support = (ts[0], ts[ts.len() - 1]);
        let knots = ts.clone();
        let f = move |t: f64| {
            let k = knots.partition_point(|x| *x <= t).clamp(1, knots.len() - 1);
            let (t0, t1) = (knots[k - 1], knots[k]);
            let s = (t - t0) / (t1 - t0);
            values[k - 1] * (1.0 - s) + values[k] * s
        };
        Ok(Self::from_density(f, support, ts))
    }

    /// The density `½|t|`.
    pub fn half_abs() -> Self {
        Self::from_density(|t| 0.5 * t.abs(), (-1.0, 1.0), vec![0.0])
    }

    pub fn with_atom(mut self, t: f64, weight: f64) -> Self {
        self.atoms.push((t, weight));
        self
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn has_density(&self) -> bool {
        self.density.is_some()
    }

    pub fn density(&self, t: f64) -> f64 {
        match &self.density {
            Some(f) if t >= self.support.0 && t <= self.support.1 => f(t),
            _ => 0.0,
        }
    }

    /// The reflected profile under `ϑ ↦ ϑ^{-1}`; a zonal measure on the
    /// sphere equals its own reflection.
    pub fn hat(&self) -> Self {
        self.clone()
    }

    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        if let Some(f) = self.density.clone() {
            out.density = Some(Arc::new(move |t| c * f(t)));
        }
        out.atoms.iter_mut().for_each(|a| a.1 *= c);
        out
    }

    /// Sum of two profiles as measures.
    pub fn sum(&self, other: &Self) -> Self {
        let density: Option<Kernel> = match (&self.density, &other.density) {
            (None, None) => None,
            _ => {
                let (a, b) = (self.clone(), other.clone());
                Some(Arc::new(move |t| a.density(t) + b.density(t)))
            }
        };
        let support = match (&self.density, &other.density) {
            (Some(_), Some(_)) => (
                self.support.0.min(other.support.0),
                self.support.1.max(other.support.1),
            ),
            (Some(_), None) => self.support,
            (None, Some(_)) => other.support,
            (None, None) => (1.0, 1.0),
        };
        let mut breakpoints = self.breakpoints.clone();
        breakpoints.extend(&other.breakpoints);
        for s in [self, other] {
            if s.density.is_some() {
                breakpoints.extend([s.support.0, s.support.1]);
            }
        }
        breakpoints.retain(|t| *t > support.0 && *t < support.1);
        breakpoints.sort_by(f64::total_cmp);
        breakpoints.dedup();
        let mut atoms = self.atoms.clone();
        atoms.extend(&other.atoms);
        Self {
            density,
            support,
            breakpoints,
            atoms,
        }
    }

    /// Polar-angle segments `[θ_a, θ_b]` on which the density is smooth.
    fn theta_segments(&self) -> Vec<(f64, f64)> {
        if self.density.is_none() {
            return Vec::new();
        }
        let mut thetas: Vec<f64> = std::iter::once(self.support.1)
            .chain(self.breakpoints.iter().rev().copied())
            .chain(std::iter::once(self.support.0))
            .map(|t| t.clamp(-1.0, 1.0).acos())
            .collect();
        thetas.dedup();
        thetas
            .windows(2)
            .filter(|w| w[1] > w[0])
            .map(|w| (w[0], w[1]))
            .collect()
    }

    /// Total mass in dimension `n`.
    pub fn total_mass(&self, n: usize) -> f64 {
        let c = polar_density_constant(n);
        let mut s = 0.0;
        for (a, b) in self.theta_segments() {
            let (x, w) = gauss_legendre_on(64, a, b);
            for (th, wt) in x.iter().zip(&w) {
                s += wt * c * th.sin().powi(n as i32 - 2) * self.density(th.cos());
            }
        }
        s + self.atoms.iter().map(|a| a.1).sum::<f64>()
    }
}

/// Product quadrature used for convolving closed-form fields: Gauss–Legendre
/// in the polar angle times an equal-weight rule on each ring.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConvolutionRule {
    pub theta_nodes: usize,
    pub ring_nodes: usize,
}

impl ConvolutionRule {
    pub fn for_dim(n: usize) -> Self {
        if n == 3 {
            Self {
                theta_nodes: 24,
                ring_nodes: 64,
            }
        } else {
            Self {
                theta_nodes: 24,
                ring_nodes: 256,
            }
        }
    }
}

/// Equal-weight directions on `S^{n-2}`: equispaced on the circle, or a
/// Fibonacci spiral on `S^2`.
fn ring_directions(n: usize, count: usize) -> Vec<Vec<f64>> {
    let count = count.max(2);
    if n == 3 {
        (0..count)
            .map(|j| {
                let a = 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / count as f64;
                vec![a.cos(), a.sin()]
            })
            .collect()
    } else {
        let golden = (1.0 + 5f64.sqrt()) / 2.0;
        (0..count)
            .map(|k| {
                let z = 1.0 - (2 * k + 1) as f64 / count as f64;
                let r = (1.0 - z * z).max(0.0).sqrt();
                let phi = 2.0 * std::f64::consts::PI * (k as f64 / golden).fract();
                vec![r * phi.cos(), r * phi.sin(), z]
            })
            .collect()
    }
}

struct Ring {
    basis: nalgebra::DMatrix<f64>,
    dirs: Vec<Vec<f64>>,
}

impl Ring {
    fn new(u: &[f64], count: usize) -> Self {
        let n = u.len();
        let col = nalgebra::DMatrix::from_column_slice(n, 1, u);
        Self {
            basis: orthogonal_complement(&col),
            dirs: ring_directions(n, count),
        }
    }

    fn point(&self, u: &[f64], theta: f64, dir: &[f64]) -> Vec<f64> {
        let (c, s) = (theta.cos(), theta.sin());
        let w = &self.basis * DVector::from_column_slice(dir);
        let mut v: Vec<f64> = u.iter().zip(w.iter()).map(|(a, b)| c * a + s * b).collect();
        let r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= r);
        v
    }

    fn mean(&self, f: &dyn Fn(&[f64]) -> f64, u: &[f64], theta: f64) -> f64 {
        let s: f64 = self.dirs.iter().map(|d| f(&self.point(u, theta, d))).sum();
        s / self.dirs.len() as f64
    }
}

fn atom_value(f: &dyn Fn(&[f64]) -> f64, u: &[f64], t: f64, ring: &Ring) -> f64 {
    if t >= 1.0 {
        f(u)
    } else if t <= -1.0 {
        let v: Vec<f64> = u.iter().map(|x| -x).collect();
        f(&v)
    } else {
        ring.mean(f, u, t.acos())
    }
}

/// `(f ∗ ζ)(u)` for a closed-form field `f`, by product quadrature.
pub fn convolve_field_at(
    f: &dyn Fn(&[f64]) -> f64,
    u: &[f64],
    zeta: &ZonalProfile,
    rule: ConvolutionRule,
) -> Estimate {
    let n = u.len();
    let ring = Ring::new(u, rule.ring_nodes);
    let c = polar_density_constant(n);
    let mut weights = Vec::new();
    let mut values = Vec::new();
    for (a, b) in zeta.theta_segments() {
        let (x, w) = gauss_legendre_on(rule.theta_nodes, a, b);
        for (th, wt) in x.iter().zip(&w) {
            let rho = zeta.density(th.cos());
            let base = wt * c * th.sin().powi(n as i32 - 2) / ring.dirs.len() as f64;
            for d in &ring.dirs {
                weights.push(base);
                values.push(f(&ring.point(u, *th, d)) * rho);
            }
        }
    }
    let mut est = if weights.is_empty() {
        Estimate::exact(0.0)
    } else {
        Estimate::from_weighted_terms(&weights, &values)
    };
    for &(t, w) in zeta.atoms() {
        est.value += w * atom_value(f, u, t, &ring);
    }
    est
}

/// Convolution of a closed-form field with a zonal profile, evaluated at
/// every node of `grid`.
pub fn convolve_field(
    f: impl Fn(&[f64]) -> f64 + Sync,
    zeta: &ZonalProfile,
    grid: Arc<SphereGrid>,
    rule: ConvolutionRule,
) -> EstimatedFunction {
    let est: Vec<Estimate> = (0..grid.len())
        .into_par_iter()
        .map(|k| convolve_field_at(&f, grid.node(k), zeta, rule))
        .collect();
    EstimatedFunction::from_estimates(grid, &est)
}

/// Convolution of a tabulated function with a zonal profile: grid
/// quadrature for the density, direct evaluation for atoms.
pub fn convolve_zonal_estimated(f: &SphericalFunction, zeta: &ZonalProfile) -> EstimatedFunction {
    let grid = f.grid().clone();
    let n = grid.dim();
    let eval = |v: &[f64]| f.eval(v);
    let est: Vec<Estimate> = (0..grid.len())
        .into_par_iter()
        .map(|k| {
            let u = grid.node(k);
            let mut e = if zeta.has_density() {
                let vals: Vec<f64> = grid
                    .nodes()
                    .zip(f.values())
                    .map(|(v, fv)| {
                        fv * zeta.density(
                            v.iter()
                                .zip(u)
                                .map(|(a, b)| a * b)
                                .sum::<f64>()
                                .clamp(-1.0, 1.0),
                        )
                    })
                    .collect();
                grid.estimate(&vals)
            } else {
                Estimate::exact(0.0)
            };
            for &(t, w) in zeta.atoms() {
                let v = if t >= 1.0 {
                    f.values()[k]
                } else {
                    let ring = Ring::new(u, ConvolutionRule::for_dim(n).ring_nodes);
                    atom_value(&eval, u, t, &ring)
                };
                e.value += w * v;
            }
            e
        })
        .collect();
    EstimatedFunction::from_estimates(grid, &est)
}

/// `f ∗ ζ` on the grid of `f`.
pub fn convolve_zonal(f: &SphericalFunction, zeta: &ZonalProfile) -> SphericalFunction {
    convolve_zonal_estimated(f, zeta).function
}

/// Smooth nonnegative bump `(1 - ((1-t)/(1-cos(1/m)))²)³` on the cap of
/// geodesic radius `1/m` around the pole, normalized to unit mass.
pub fn approximate_identity(m: u32, n: usize) -> Result<ZonalProfile> {
    if n != 3 && n != 4 {
        return Err(Error::UnsupportedDimension(n));
    }
    if m == 0 {
        return invalid("approximate identity index must be positive");
    }
    let radius = 1.0 / m as f64;
    let width = 1.0 - radius.cos();
    let bump = move |t: f64| {
        let s = (1.0 - t) / width;
        (1.0 - s * s).max(0.0).powi(3)
    };
    let raw = ZonalProfile::from_density(bump, (radius.cos(), 1.0), Vec::new());
    let mass = raw.total_mass(n);
    Ok(raw.scaled(1.0 / mass))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::grid::{build_sphere_grid, GridKind};

    fn grid(n: usize, nodes: usize) -> Arc<SphereGrid> {
        Arc::new(build_sphere_grid(n, nodes, GridKind::Fibonacci, 11).unwrap())
    }

    #[test]
    fn dirac_is_identity() {
        let g = grid(3, 300);
        let f = SphericalFunction::from_fn(g.clone(), |u| u[0] * u[1] + u[2]);
        let out = convolve_zonal(&f, &ZonalProfile::dirac());
        assert_eq!(out.values(), f.values());
    }

    #[test]
    fn probability_profiles_preserve_constants() {
        for n in [3, 4] {
            let zeta = approximate_identity(3, n).unwrap();
            assert!((zeta.total_mass(n) - 1.0).abs() < 1e-10);
            let mut pole = vec![0.0; n];
            pole[0] = 1.0;
            let e = convolve_field_at(&|_| 2.5, &pole, &zeta, ConvolutionRule::for_dim(n));
            assert!((e.value - 2.5).abs() < 1e-10);
        }
    }

    #[test]
    fn bump_vanishes_outside_cap() {
        let zeta = approximate_identity(8, 3).unwrap();
        assert_eq!(zeta.density((0.2f64).cos()), 0.0);
        assert!(zeta.density(1.0) > 0.0);
    }

    #[test]
    fn half_abs_mass() {
        // ∫ ½|t| dv = ½ E|t| = 1/4 on S^2.
        assert!((ZonalProfile::half_abs().total_mass(3) - 0.25).abs() < 1e-12);
    }

    #[test]
    fn linear_function_is_scaled_by_first_moment() {
        let zeta = approximate_identity(4, 3).unwrap();
        let u = [0.6, 0.0, 0.8];
        let e = convolve_field_at(&|v| v[0], &u, &zeta, ConvolutionRule::for_dim(3));
        // Funk–Hecke: the ratio is the mean of t under the profile.
        let ratio = e.value / 0.6;
        assert!(ratio < 1.0 && ratio > 0.95);
        let e2 = convolve_field_at(&|v| v[2], &u, &zeta, ConvolutionRule::for_dim(3));
        assert!((e2.value / 0.8 - ratio).abs() < 1e-12);
    }

    #[test]
    fn tabulated_profile_interpolates() {
        let p = ZonalProfile::tabulated(vec![-1.0, 0.0, 1.0], vec![0.0, 1.0, 0.0]).unwrap();
        assert!((p.density(0.5) - 0.5).abs() < 1e-15);
        assert!((p.total_mass(3) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn grid_and_field_routes_agree() {
        let g = grid(3, 3000);
        let zeta = ZonalProfile::half_abs();
        let h = |v: &[f64]| v[0].abs() + 0.5 * v[1];
        let f = SphericalFunction::from_fn(g.clone(), h);
        let a = convolve_zonal(&f, &zeta);
        let b = convolve_field(h, &zeta, g, ConvolutionRule::for_dim(3));
        assert!(a.max_abs_difference(&b.function).unwrap() < 5e-3);
    }
}
