//! Area measures of polytopes.
//!
//! `S_i(P, ·)` puts mass `vol_i(F) / C(n-1, i)` on the spherical normal-cone
//! region of every `i`-face `F`. Regions are discretized as follows: facets
//! are single atoms, arcs are split into short pieces carrying two atoms
//! each, two-dimensional regions are sampled, and `S_0` (spherical Lebesgue
//! measure for every body) is a uniform grid.

use rand::Rng as _;

use super::atomic::AtomicMeasure;
use crate::consts::{binom, omega};
use crate::error::{invalid, Error, Result};
use crate::geometry::faces::{cone_solid_angle, Face, FaceLattice};
use crate::geometry::Polytope;
use crate::linalg::dot;
use crate::rng::{stream, tags};
use crate::sphere::{build_sphere_grid, GridKind};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AreaOptions {
    /// Longest sub-arc, in radians, for one-dimensional regions.
    pub arc_step: f64,
    /// Accepted samples per `4π` of solid angle for two-dimensional regions.
    pub region_density: usize,
    /// Grid size used for `S_0`.
    pub sphere_nodes: usize,
    pub seed: u64,
}

impl Default for AreaOptions {
    fn default() -> Self {
        Self {
            arc_step: 0.05,
            region_density: 4000,
            sphere_nodes: 2000,
            seed: 0,
        }
    }
}

fn full_lattice(p: &Polytope) -> Result<&FaceLattice> {
    p.lattice().ok_or_else(|| {
        Error::DegenerateBody("area measures need a full-dimensional polytope".into())
    })
}

/// `S_{n-1}(P, ·)`: one atom per facet at its outer normal, weighted by the
/// facet area.
pub fn surface_area_measure(p: &Polytope) -> Result<AtomicMeasure> {
    let l = full_lattice(p)?;
    let n = l.dim;
    let mut m = AtomicMeasure::empty(n);
    for f in &l.faces[n - 1] {
        m.push_unchecked(&l.normals[f.facets[0]], f.volume);
    }
    Ok(m)
}

/// `S_i(P, ·)` for `0 ≤ i ≤ n-1`.
pub fn area_measure(p: &Polytope, i: usize, opts: &AreaOptions) -> Result<AtomicMeasure> {
    let n = p.dim();
    if i >= n {
        return invalid(format!("area measure order {i} outside 0..{n}"));
    }
    if i == n - 1 {
        return surface_area_measure(p);
    }
    let l = full_lattice(p)?;
    let mut m = AtomicMeasure::empty(n);
    if i == 0 {
        let grid = build_sphere_grid(n, opts.sphere_nodes, GridKind::Fibonacci, opts.seed)?;
        let w = omega(n) / grid.len() as f64;
        for u in grid.nodes() {
            m.push_unchecked(u, w);
        }
        return Ok(m);
    }
    let c = binom(n - 1, i);
    for (k, face) in l.faces[i].iter().enumerate() {
        let mass = face.volume / c;
        match n - i {
            2 => push_arc(&mut m, l, face, mass, opts.arc_step),
            3 => push_region(&mut m, l, face, mass, opts, k as u64),
            _ => unreachable!("codimension at most 3 for n ≤ 4"),
        }
    }
    Ok(m)
}

/// `s_i(P, ·) = ½ S_i(P, ·) + ½ S_i(-P, ·)`.
pub fn even_area_measure(p: &Polytope, i: usize, opts: &AreaOptions) -> Result<AtomicMeasure> {
    Ok(area_measure(p, i, opts)?.even_part())
}

fn normalized(mut v: Vec<f64>) -> Vec<f64> {
    let r = dot(&v, &v).sqrt();
    v.iter_mut().for_each(|x| *x /= r);
    v
}

/// Arc between the two extreme normals of a codimension-2 face. A sub-arc
/// of angle `δ` becomes two atoms at `±β` from its midpoint with
/// `cos β = 2 sin(δ/2) / δ`, which integrates linear functions exactly.
fn push_arc(m: &mut AtomicMeasure, l: &FaceLattice, face: &Face, mass: f64, step: f64) {
    let gens = l.normal_cone(face);
    let (mut a, mut b, mut best) = (gens[0], gens[0], -1.0);
    for (x, g) in gens.iter().enumerate() {
        for h in &gens[x + 1..] {
            let ang = dot(g, h).clamp(-1.0, 1.0).acos();
            if ang > best {
                (a, b, best) = (g, h, ang);
            }
        }
    }
    let angle = best.max(0.0);
    let ab = dot(a, b);
    let t = normalized(b.iter().zip(a).map(|(y, x)| y - ab * x).collect());
    let pieces = ((angle / step).ceil() as usize).max(1);
    let delta = angle / pieces as f64;
    let beta = if delta > 1e-8 {
        (2.0 * (delta / 2.0).sin() / delta).clamp(-1.0, 1.0).acos()
    } else {
        0.0
    };
    for k in 0..pieces {
        let mid = (k as f64 + 0.5) * delta;
        for theta in [mid - beta, mid + beta] {
            let (s, c) = theta.sin_cos();
            let u: Vec<f64> = a.iter().zip(&t).map(|(x, y)| c * x + s * y).collect();
            m.push_unchecked(&normalized(u), mass * delta / 2.0);
        }
    }
}

/// Two-dimensional normal-cone region, sampled by rejection from the
/// smallest cap around the mean generator. The total weight is the exact
/// solid angle.
fn push_region(
    m: &mut AtomicMeasure,
    l: &FaceLattice,
    face: &Face,
    mass: f64,
    opts: &AreaOptions,
    index: u64,
) {
    let gens = l.normal_cone(face);
    let omega_f = cone_solid_angle(&gens);
    if omega_f <= 0.0 {
        return;
    }
    let n = l.dim;
    let axis = normalized((0..n).map(|c| gens.iter().map(|g| g[c]).sum()).collect());
    // Orthonormal e1, e2 completing the axis inside the span of the cone.
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for g in &gens {
        let mut r: Vec<f64> = g.to_vec();
        for _ in 0..2 {
            for b in std::iter::once(&axis).chain(basis.iter()) {
                let p = dot(&r, b);
                r.iter_mut().zip(b).for_each(|(x, y)| *x -= p * y);
            }
        }
        let len = dot(&r, &r).sqrt();
        if len > 1e-6 && basis.len() < 2 {
            basis.push(r.into_iter().map(|x| x / len).collect());
        }
    }
    if basis.len() < 2 {
        return;
    }
    let cos_rho = gens
        .iter()
        .map(|g| dot(g, &axis))
        .fold(1.0, f64::min)
        .clamp(-1.0, 1.0);
    let anchor = l.point(face.vertices[0]).to_vec();
    let count = l.points.len() / n;
    let tol = 1e-12 * (1.0 + dot(&anchor, &anchor).sqrt());
    let target = ((opts.region_density as f64 * omega_f / (4.0 * std::f64::consts::PI)).ceil()
        as usize)
        .max(16);
    let mut rng = stream(opts.seed, tags::FACE, index);
    let mut accepted = Vec::with_capacity(target);
    let mut tries = 0usize;
    while accepted.len() < target && tries < 1000 * target {
        tries += 1;
        let z = 1.0 - rng.random::<f64>() * (1.0 - cos_rho);
        let phi = rng.random::<f64>() * std::f64::consts::TAU;
        let s = (1.0 - z * z).max(0.0).sqrt();
        let u: Vec<f64> = (0..n)
            .map(|c| z * axis[c] + s * (phi.cos() * basis[0][c] + phi.sin() * basis[1][c]))
            .collect();
        let ua = dot(&u, &anchor);
        if (0..count).all(|w| dot(&u, l.point(w)) <= ua + tol) {
            accepted.push(normalized(u));
        }
    }
    let w = mass * omega_f / accepted.len().max(1) as f64;
    for u in &accepted {
        m.push_unchecked(u, w);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::random_polytope;
    use std::f64::consts::PI;

    #[test]
    fn cube_surface_measure() {
        let m = surface_area_measure(&Polytope::unit_cube(3)).unwrap();
        assert_eq!(m.len(), 6);
        for (u, w) in m.atoms() {
            assert!((w - 1.0).abs() < 1e-12);
            assert!((u.iter().map(|x| x.abs()).sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn cube_total_masses() {
        let opts = AreaOptions::default();
        let c3 = Polytope::unit_cube(3);
        assert!((area_measure(&c3, 1, &opts).unwrap().total_mass() - 3.0 * PI).abs() < 1e-9);
        assert!((area_measure(&c3, 0, &opts).unwrap().total_mass() - 4.0 * PI).abs() < 1e-9);
        let c4 = Polytope::unit_cube(4);
        // 32 unit edges, normal cones an eighth of S^2, C(3,1) = 3.
        let s1 = area_measure(&c4, 1, &opts).unwrap().total_mass();
        assert!((s1 - 32.0 * (4.0 * PI / 8.0) / 3.0).abs() < 1e-9);
        // 24 unit squares, quarter arcs, C(3,2) = 3.
        let s2 = area_measure(&c4, 2, &opts).unwrap().total_mass();
        assert!((s2 - 24.0 * (PI / 2.0) / 3.0).abs() < 1e-9);
    }

    #[test]
    fn area_measures_have_zero_centroid() {
        let p = random_polytope(3, 15, 3).unwrap();
        let opts = AreaOptions::default();
        for i in 1..3 {
            let m = area_measure(&p, i, &opts).unwrap();
            for c in 0..3 {
                assert!(m.integrate(|u| u[c]).abs() < 1e-9 * m.total_mass());
            }
        }
        let q = random_polytope(4, 12, 3).unwrap();
        let m = area_measure(&q, 1, &opts).unwrap();
        for c in 0..4 {
            assert!(m.integrate(|u| u[c]).abs() < 0.05 * m.total_mass());
        }
    }

    #[test]
    fn region_samples_stay_in_normal_cones() {
        let q = Polytope::unit_cube(4);
        let m = area_measure(
            &q,
            1,
            &AreaOptions {
                region_density: 400,
                ..Default::default()
            },
        )
        .unwrap();
        for (u, _) in m.atoms() {
            // Edge normal cones of the cube are orthants of coordinate 3-planes.
            assert_eq!(u.iter().filter(|x| x.abs() < 1e-12).count(), 1);
        }
    }

    #[test]
    fn scaling_and_rotation() {
        let p = random_polytope(3, 12, 8).unwrap();
        let s = surface_area_measure(&p).unwrap();
        let s2 = surface_area_measure(&p.scale(2.0)).unwrap();
        assert!((s2.total_mass() - 4.0 * s.total_mass()).abs() < 1e-9);
        let q = crate::linalg::haar_orthogonal(3, &mut stream(1, 0, 0));
        let rotated = surface_area_measure(&p.transform(&q)).unwrap();
        let expect = s.rotated(&q);
        let f = |u: &[f64]| u[0] * u[0] + 0.3 * u[1] - u[2].powi(3);
        assert!((rotated.integrate(f) - expect.integrate(f)).abs() < 1e-9);
    }
}
