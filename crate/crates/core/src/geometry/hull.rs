//! Convex hulls and hull volumes in dimensions 1 to 4.
//!
//! Dimensions 3 and 4 use quickhull with conflict lists; the plane uses
//! Andrew's monotone chain. Orientation tests that land within a thin band
//! around zero are recomputed with double-double determinants.

use std::collections::{HashMap, HashSet};

use crate::linalg::{det_extended, det_small};

const MAX_DIM: usize = 4;
const NONE: usize = usize::MAX;

/// Relative distance below which a point counts as lying on a facet plane.
const PLANE_EPS: f64 = 1e-10;
/// Relative residual below which the input counts as lower-dimensional.
const RANK_EPS: f64 = 1e-10;
/// Relative orientation magnitude that triggers the extended-precision test.
const AMBIGUOUS: f64 = 1e-10;

/// A simplicial facet with outward unit normal: `normal · x ≤ offset` on
/// the hull.
#[derive(Debug, Clone)]
pub struct Facet {
    pub vertices: Vec<usize>,
    pub normal: Vec<f64>,
    pub offset: f64,
    /// `(d-1)`-volume of the simplex.
    pub measure: f64,
}

#[derive(Debug, Clone)]
pub struct Hull {
    pub dim: usize,
    pub facets: Vec<Facet>,
    /// Sorted indices of the points that are hull vertices.
    pub vertices: Vec<usize>,
    pub interior: Vec<f64>,
    /// Diameter of the bounding box, used to scale tolerances.
    pub scale: f64,
}

impl Hull {
    /// Volume by summing the simplices spanned by each facet and the
    /// interior point.
    pub fn volume(&self, points: &[f64]) -> f64 {
        let d = self.dim;
        if d == 1 {
            let xs = self.vertices.iter().map(|&i| points[i]);
            let (lo, hi) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| {
                (a.min(x), b.max(x))
            });
            return hi - lo;
        }
        let mut m = [0.0; MAX_DIM * MAX_DIM];
        let mut parts = Vec::with_capacity(self.facets.len());
        for f in &self.facets {
            for (r, &v) in f.vertices.iter().enumerate() {
                for c in 0..d {
                    m[r * d + c] = points[v * d + c] - self.interior[c];
                }
            }
            parts.push(det_small(&mut m[..d * d], d).abs());
        }
        crate::stats::pairwise_sum(&parts) / crate::consts::factorial(d)
    }
}

fn point(points: &[f64], d: usize, i: usize) -> &[f64] {
    &points[i * d..(i + 1) * d]
}

fn bounding_scale(points: &[f64], d: usize) -> f64 {
    let count = points.len() / d;
    let mut s = 0.0;
    for c in 0..d {
        let (lo, hi) = (0..count)
            .map(|i| points[i * d + c])
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| {
                (a.min(x), b.max(x))
            });
        s += (hi - lo) * (hi - lo);
    }
    s.sqrt()
}

/// Greedy choice of up to `d + 1` affinely independent points, each the
/// farthest from the span of those already chosen.
fn initial_simplex(points: &[f64], d: usize, scale: f64) -> Vec<usize> {
    let count = points.len() / d;
    let mut first = 0;
    for i in 1..count {
        if points[i * d] < points[first * d] {
            first = i;
        }
    }
    let base = point(points, d, first).to_vec();
    let mut chosen = vec![first];
    let mut basis: Vec<Vec<f64>> = Vec::new();
    while chosen.len() < d + 1 {
        let mut best = (0.0, NONE, Vec::new());
        for i in 0..count {
            let mut v: Vec<f64> = point(points, d, i)
                .iter()
                .zip(&base)
                .map(|(a, b)| a - b)
                .collect();
            for _ in 0..2 {
                for b in &basis {
                    let p: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
                    v.iter_mut().zip(b).for_each(|(x, y)| *x -= p * y);
                }
            }
            let r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if r > best.0 {
                best = (r, i, v);
            }
        }
        if best.1 == NONE || best.0 <= RANK_EPS * scale {
            break;
        }
        let r = best.0;
        basis.push(best.2.into_iter().map(|x| x / r).collect());
        chosen.push(best.1);
    }
    chosen
}

/// Dimension of the affine hull of `points` (flat, stride `d`).
pub fn affine_dimension(points: &[f64], d: usize) -> usize {
    if points.is_empty() {
        return 0;
    }
    let scale = bounding_scale(points, d);
    if scale == 0.0 {
        return 0;
    }
    initial_simplex(points, d, scale).len() - 1
}

struct WorkFacet {
    verts: [usize; MAX_DIM],
    normal: [f64; MAX_DIM],
    offset: f64,
    raw_norm: f64,
    flip: f64,
    alive: bool,
    outside: Vec<usize>,
    far: usize,
    far_dist: f64,
}

type RidgeKey = [usize; MAX_DIM - 1];

struct QuickHull<'a> {
    pts: &'a [f64],
    d: usize,
    scale: f64,
    eps: f64,
    interior: [f64; MAX_DIM],
    facets: Vec<WorkFacet>,
    ridges: HashMap<RidgeKey, [usize; 2]>,
}

#[derive(Debug)]
struct TopologyError;

impl<'a> QuickHull<'a> {
    fn p(&self, i: usize) -> &[f64] {
        point(self.pts, self.d, i)
    }

    fn make_facet(&self, verts: [usize; MAX_DIM]) -> WorkFacet {
        let d = self.d;
        let v0 = self.p(verts[0]);
        let mut rows = [0.0; MAX_DIM * MAX_DIM];
        for k in 1..d {
            let vk = self.p(verts[k]);
            for c in 0..d {
                rows[(k - 1) * d + c] = vk[c] - v0[c];
            }
        }
        let mut normal = [0.0; MAX_DIM];
        let mut minor = [0.0; MAX_DIM * MAX_DIM];
        for j in 0..d {
            let m = d - 1;
            for r in 0..m {
                let mut cc = 0;
                for c in 0..d {
                    if c != j {
                        minor[r * m + cc] = rows[r * d + c];
                        cc += 1;
                    }
                }
            }
            let det = if m == 0 {
                1.0
            } else {
                det_small(&mut minor[..m * m], m)
            };
            normal[j] = if j % 2 == 0 { det } else { -det };
        }
        let raw_norm = normal[..d].iter().map(|x| x * x).sum::<f64>().sqrt();
        let mut flip = 1.0;
        let mut offset = 0.0;
        if raw_norm > 0.0 {
            for x in &mut normal[..d] {
                *x /= raw_norm;
            }
            offset = (0..d).map(|c| normal[c] * v0[c]).sum();
            let side: f64 = (0..d).map(|c| normal[c] * self.interior[c]).sum::<f64>() - offset;
            if side > 0.0 {
                flip = -1.0;
                for x in &mut normal[..d] {
                    *x = -*x;
                }
                offset = -offset;
            }
        }
        WorkFacet {
            verts,
            normal,
            offset,
            raw_norm,
            flip,
            alive: true,
            outside: Vec::new(),
            far: NONE,
            far_dist: 0.0,
        }
    }

    /// Signed distance of point `i` above facet `f`.
    fn dist(&self, f: &WorkFacet, i: usize) -> f64 {
        let d = self.d;
        let q = self.p(i);
        let dist = (0..d).map(|c| f.normal[c] * q[c]).sum::<f64>() - f.offset;
        if dist.abs() > AMBIGUOUS * self.scale || f.raw_norm == 0.0 {
            return dist;
        }
        let v0 = self.p(f.verts[0]);
        let mut m = [0.0; MAX_DIM * MAX_DIM];
        for k in 1..d {
            let vk = self.p(f.verts[k]);
            for c in 0..d {
                m[(k - 1) * d + c] = vk[c] - v0[c];
            }
        }
        for c in 0..d {
            m[(d - 1) * d + c] = q[c] - v0[c];
        }
        let det = det_extended(&m[..d * d], d);
        let sign = if (d - 1).is_multiple_of(2) { 1.0 } else { -1.0 };
        sign * det * f.flip / f.raw_norm
    }

    fn ridge_keys(&self, verts: &[usize; MAX_DIM]) -> Vec<RidgeKey> {
        let d = self.d;
        (0..d)
            .map(|skip| {
                let mut key = [NONE; MAX_DIM - 1];
                let mut k = 0;
                for (j, &v) in verts[..d].iter().enumerate() {
                    if j != skip {
                        key[k] = v;
                        k += 1;
                    }
                }
                key[..d - 1].sort_unstable();
                key
            })
            .collect()
    }

    fn register(&mut self, fi: usize) -> Result<(), TopologyError> {
        let keys = self.ridge_keys(&self.facets[fi].verts);
        for key in keys {
            let slot = self.ridges.entry(key).or_insert([NONE, NONE]);
            if slot[0] == NONE {
                slot[0] = fi;
            } else if slot[1] == NONE {
                slot[1] = fi;
            } else {
                return Err(TopologyError);
            }
        }
        Ok(())
    }

    fn unregister(&mut self, fi: usize) {
        let keys = self.ridge_keys(&self.facets[fi].verts);
        for key in keys {
            if let Some(slot) = self.ridges.get_mut(&key) {
                for s in slot.iter_mut() {
                    if *s == fi {
                        *s = NONE;
                    }
                }
            }
        }
    }

    fn neighbor(&self, key: &RidgeKey, fi: usize) -> usize {
        match self.ridges.get(key) {
            Some(slot) if slot[0] == fi => slot[1],
            Some(slot) => slot[0],
            None => NONE,
        }
    }

    fn assign(&mut self, candidates: &[usize], targets: &[usize]) {
        for &q in candidates {
            for &t in targets {
                let dq = self.dist(&self.facets[t], q);
                if dq > self.eps {
                    let f = &mut self.facets[t];
                    f.outside.push(q);
                    if dq > f.far_dist {
                        f.far_dist = dq;
                        f.far = q;
                    }
                    break;
                }
            }
        }
    }

    fn run(&mut self, simplex: &[usize]) -> Result<(), TopologyError> {
        let d = self.d;
        for k in 0..=d {
            let mut verts = [NONE; MAX_DIM];
            let mut j = 0;
            for (m, &s) in simplex.iter().enumerate() {
                if m != k {
                    verts[j] = s;
                    j += 1;
                }
            }
            let f = self.make_facet(verts);
            self.facets.push(f);
            let fi = self.facets.len() - 1;
            self.register(fi)?;
        }
        let in_simplex: HashSet<usize> = simplex.iter().copied().collect();
        let count = self.pts.len() / d;
        let rest: Vec<usize> = (0..count).filter(|i| !in_simplex.contains(i)).collect();
        let all: Vec<usize> = (0..self.facets.len()).collect();
        self.assign(&rest, &all);

        let mut stack: Vec<usize> = all;
        while let Some(fi) = stack.pop() {
            if !self.facets[fi].alive || self.facets[fi].outside.is_empty() {
                continue;
            }
            let apex = self.facets[fi].far;
            let mut visible = vec![fi];
            let mut is_visible: HashSet<usize> = HashSet::from([fi]);
            let mut seen: HashSet<usize> = HashSet::from([fi]);
            let mut head = 0;
            while head < visible.len() {
                let v = visible[head];
                head += 1;
                for key in self.ridge_keys(&self.facets[v].verts) {
                    let g = self.neighbor(&key, v);
                    if g == NONE {
                        return Err(TopologyError);
                    }
                    if seen.insert(g) && self.dist(&self.facets[g], apex) > self.eps {
                        is_visible.insert(g);
                        visible.push(g);
                    }
                }
            }
            let mut horizon: Vec<RidgeKey> = Vec::new();
            for &v in &visible {
                for key in self.ridge_keys(&self.facets[v].verts) {
                    let g = self.neighbor(&key, v);
                    if !is_visible.contains(&g) {
                        horizon.push(key);
                    }
                }
            }
            let mut orphans = Vec::new();
            for &v in &visible {
                orphans.extend(self.facets[v].outside.drain(..).filter(|&q| q != apex));
                self.facets[v].alive = false;
                self.unregister(v);
            }
            let mut created = Vec::with_capacity(horizon.len());
            for key in horizon {
                let mut verts = [NONE; MAX_DIM];
                verts[..d - 1].copy_from_slice(&key[..d - 1]);
                verts[d - 1] = apex;
                let f = self.make_facet(verts);
                if f.raw_norm == 0.0 {
                    return Err(TopologyError);
                }
                self.facets.push(f);
                let fi = self.facets.len() - 1;
                self.register(fi)?;
                created.push(fi);
            }
            self.assign(&orphans, &created);
            stack.extend(
                created
                    .iter()
                    .copied()
                    .filter(|&c| !self.facets[c].outside.is_empty()),
            );
        }
        Ok(())
    }
}

/// Andrew's monotone chain; returns hull indices in counter-clockwise order
/// without collinear points.
pub fn planar_hull(points: &[f64]) -> Vec<usize> {
    let count = points.len() / 2;
    let mut idx: Vec<usize> = (0..count).collect();
    idx.sort_by(|&a, &b| {
        points[2 * a]
            .total_cmp(&points[2 * b])
            .then(points[2 * a + 1].total_cmp(&points[2 * b + 1]))
    });
    idx.dedup_by(|a, b| {
        points[2 * *a] == points[2 * *b] && points[2 * *a + 1] == points[2 * *b + 1]
    });
    if idx.len() < 3 {
        return idx;
    }
    let scale = bounding_scale(points, 2);
    let cross = |o: usize, a: usize, b: usize| {
        (points[2 * a] - points[2 * o]) * (points[2 * b + 1] - points[2 * o + 1])
            - (points[2 * a + 1] - points[2 * o + 1]) * (points[2 * b] - points[2 * o])
    };
    let tol = PLANE_EPS * scale * scale;
    let mut hull: Vec<usize> = Vec::with_capacity(2 * idx.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &usize>> = if pass == 0 {
            Box::new(idx.iter())
        } else {
            Box::new(idx.iter().rev())
        };
        for &i in iter {
            while hull.len() >= start + 2
                && cross(hull[hull.len() - 2], hull[hull.len() - 1], i) <= tol
            {
                hull.pop();
            }
            hull.push(i);
        }
        hull.pop();
    }
    hull
}

/// Area of a planar point set's convex hull.
pub fn polygon_area(points: &[f64]) -> f64 {
    let h = planar_hull(points);
    if h.len() < 3 {
        return 0.0;
    }
    let mut s = 0.0;
    for k in 0..h.len() {
        let (a, b) = (h[k], h[(k + 1) % h.len()]);
        s += points[2 * a] * points[2 * b + 1] - points[2 * b] * points[2 * a + 1];
    }
    0.5 * s.abs()
}

/// Perimeter of a planar point set's convex hull (twice the length for a
/// segment).
pub fn polygon_perimeter(points: &[f64]) -> f64 {
    let h = planar_hull(points);
    if h.len() < 2 {
        return 0.0;
    }
    let mut s = 0.0;
    for k in 0..h.len() {
        let (a, b) = (h[k], h[(k + 1) % h.len()]);
        s += (points[2 * a] - points[2 * b]).hypot(points[2 * a + 1] - points[2 * b + 1]);
    }
    s
}

/// Full-dimensional convex hull of `points` (flat, stride `d`), or `None`
/// when the points span a lower-dimensional affine subspace.
pub fn convex_hull(points: &[f64], d: usize) -> Option<Hull> {
    assert!(
        (1..=MAX_DIM).contains(&d),
        "hull dimension {d} out of range"
    );
    assert_eq!(points.len() % d, 0);
    if points.is_empty() {
        return None;
    }
    let scale = bounding_scale(points, d);
    if scale == 0.0 {
        return None;
    }
    let simplex = initial_simplex(points, d, scale);
    if simplex.len() < d + 1 {
        return None;
    }
    let mut interior = [0.0; MAX_DIM];
    for &s in &simplex {
        for c in 0..d {
            interior[c] += points[s * d + c] / (d + 1) as f64;
        }
    }
    if d == 1 {
        let count = points.len();
        let lo = (0..count)
            .min_by(|&a, &b| points[a].total_cmp(&points[b]))
            .unwrap();
        let hi = (0..count)
            .max_by(|&a, &b| points[a].total_cmp(&points[b]))
            .unwrap();
        return Some(Hull {
            dim: 1,
            facets: vec![
                Facet {
                    vertices: vec![lo],
                    normal: vec![-1.0],
                    offset: -points[lo],
                    measure: 1.0,
                },
                Facet {
                    vertices: vec![hi],
                    normal: vec![1.0],
                    offset: points[hi],
                    measure: 1.0,
                },
            ],
            vertices: if lo < hi { vec![lo, hi] } else { vec![hi, lo] },
            interior: interior[..1].to_vec(),
            scale,
        });
    }
    if d == 2 {
        let h = planar_hull(points);
        let mut facets = Vec::with_capacity(h.len());
        for k in 0..h.len() {
            let (a, b) = (h[k], h[(k + 1) % h.len()]);
            let (dx, dy) = (
                points[2 * b] - points[2 * a],
                points[2 * b + 1] - points[2 * a + 1],
            );
            let r = dx.hypot(dy);
            let normal = vec![dy / r, -dx / r];
            let offset = normal[0] * points[2 * a] + normal[1] * points[2 * a + 1];
            facets.push(Facet {
                vertices: vec![a, b],
                normal,
                offset,
                measure: r,
            });
        }
        let mut vertices = h;
        vertices.sort_unstable();
        return Some(Hull {
            dim: 2,
            facets,
            vertices,
            interior: interior[..2].to_vec(),
            scale,
        });
    }
    let mut eps = PLANE_EPS * scale;
    for _ in 0..4 {
        let mut qh = QuickHull {
            pts: points,
            d,
            scale,
            eps,
            interior,
            facets: Vec::new(),
            ridges: HashMap::new(),
        };
        if qh.run(&simplex).is_ok() {
            let facets: Vec<Facet> = qh
                .facets
                .iter()
                .filter(|f| f.alive)
                .map(|f| Facet {
                    vertices: f.verts[..d].to_vec(),
                    normal: f.normal[..d].to_vec(),
                    offset: f.offset,
                    measure: f.raw_norm / crate::consts::factorial(d - 1),
                })
                .collect();
            let mut vertices: Vec<usize> = facets
                .iter()
                .flat_map(|f| f.vertices.iter().copied())
                .collect();
            vertices.sort_unstable();
            vertices.dedup();
            return Some(Hull {
                dim: d,
                facets,
                vertices,
                interior: interior[..d].to_vec(),
                scale,
            });
        }
        eps *= 100.0;
    }
    panic!("convex hull construction failed to produce a consistent topology");
}

/// Volume of the convex hull of `points` (flat, stride `d`); zero for
/// lower-dimensional point sets.
pub fn hull_volume(points: &[f64], d: usize) -> f64 {
    match d {
        0 => 0.0,
        2 => polygon_area(points),
        _ => convex_hull(points, d).map_or(0.0, |h| h.volume(points)),
    }
}
