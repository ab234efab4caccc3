//! Face lattices of full-dimensional polytopes in dimensions 1 to 4, with
//! face volumes and external angles.

use std::collections::{HashMap, HashSet};
use std::f64::consts::PI;

use super::hull::{convex_hull, hull_volume};

const NONE: usize = usize::MAX;

#[derive(Debug, Clone)]
pub struct Face {
    /// Indices into [`FaceLattice::points`], sorted.
    pub vertices: Vec<usize>,
    /// Indices of the facets containing this face, sorted.
    pub facets: Vec<usize>,
    /// Relative volume of the face; 1 for vertices.
    pub volume: f64,
}

#[derive(Debug, Clone)]
pub struct FaceLattice {
    pub dim: usize,
    /// Extreme points, stride `dim`.
    pub points: Vec<f64>,
    /// Outer unit normal of each facet.
    pub normals: Vec<Vec<f64>>,
    pub offsets: Vec<f64>,
    /// `faces[k]` lists the `k`-dimensional faces, `0 ≤ k < dim`.
    pub faces: Vec<Vec<Face>>,
    pub volume: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Greedy orthonormal basis of the span of `vectors`, keeping directions
/// whose residual exceeds `tol` times the largest input norm.
fn span_basis(vectors: &[&[f64]], tol: f64) -> Vec<Vec<f64>> {
    let scale = vectors.iter().map(|v| dot(v, v).sqrt()).fold(0.0, f64::max);
    let mut basis: Vec<Vec<f64>> = Vec::new();
    if scale == 0.0 {
        return basis;
    }
    let d = vectors[0].len();
    loop {
        let mut best = (tol * scale, None);
        for v in vectors {
            let mut r = v.to_vec();
            for _ in 0..2 {
                for b in &basis {
                    let p = dot(&r, b);
                    r.iter_mut().zip(b).for_each(|(x, y)| *x -= p * y);
                }
            }
            let len = dot(&r, &r).sqrt();
            if len > best.0 {
                best = (len, Some(r));
            }
        }
        match best {
            (len, Some(r)) => basis.push(r.into_iter().map(|x| x / len).collect()),
            _ => break,
        }
        if basis.len() == d {
            break;
        }
    }
    basis
}

/// Coordinates of `points` (stride `d`) in an orthonormal frame of their
/// affine hull, together with the affine dimension.
pub fn intrinsic_coordinates(points: &[f64], d: usize) -> (Vec<f64>, usize) {
    let count = points.len() / d;
    if count == 0 {
        return (Vec::new(), 0);
    }
    let base = &points[..d];
    let diffs: Vec<Vec<f64>> = (0..count)
        .map(|i| {
            points[i * d..(i + 1) * d]
                .iter()
                .zip(base)
                .map(|(a, b)| a - b)
                .collect()
        })
        .collect();
    let refs: Vec<&[f64]> = diffs.iter().map(|v| v.as_slice()).collect();
    let basis = span_basis(&refs, 1e-10);
    let r = basis.len();
    let mut out = Vec::with_capacity(count * r);
    for v in &diffs {
        for b in &basis {
            out.push(dot(v, b));
        }
    }
    (out, r)
}

/// Relative `k`-volume of the convex hull of the given points.
fn relative_volume(points: &[f64], d: usize, idx: &[usize], k: usize) -> f64 {
    if k == 0 {
        return 1.0;
    }
    let sub: Vec<f64> = idx
        .iter()
        .flat_map(|&i| points[i * d..(i + 1) * d].iter().copied())
        .collect();
    let (coords, r) = intrinsic_coordinates(&sub, d);
    if r < k {
        return 0.0;
    }
    hull_volume(&coords, r)
}

fn intersect_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// Solid angle of the convex cone spanned by `generators`, which must span
/// a three-dimensional subspace and be its extreme rays.
pub fn cone_solid_angle(generators: &[&[f64]]) -> f64 {
    let basis = span_basis(generators, 1e-9);
    if basis.len() < 3 {
        return 0.0;
    }
    let gens: Vec<[f64; 3]> = generators
        .iter()
        .map(|g| {
            let v = [dot(g, &basis[0]), dot(g, &basis[1]), dot(g, &basis[2])];
            let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            [v[0] / r, v[1] / r, v[2] / r]
        })
        .collect();
    let mut axis = [0.0; 3];
    for g in &gens {
        for c in 0..3 {
            axis[c] += g[c];
        }
    }
    let r = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
    axis.iter_mut().for_each(|x| *x /= r);
    let cross = |a: &[f64; 3], b: &[f64; 3]| {
        [
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ]
    };
    let d3 = |a: &[f64; 3], b: &[f64; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    let g0 = gens[0];
    let p = d3(&g0, &axis);
    let mut e1 = [
        g0[0] - p * axis[0],
        g0[1] - p * axis[1],
        g0[2] - p * axis[2],
    ];
    let r1 = d3(&e1, &e1).sqrt();
    e1.iter_mut().for_each(|x| *x /= r1);
    let e2 = cross(&axis, &e1);
    let mut order: Vec<(f64, usize)> = gens
        .iter()
        .enumerate()
        .map(|(k, g)| (d3(g, &e2).atan2(d3(g, &e1)), k))
        .collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut total = 0.0;
    let a = gens[order[0].1];
    for w in order[1..].windows(2) {
        let (b, c) = (gens[w[0].1], gens[w[1].1]);
        let num = d3(&a, &cross(&b, &c)).abs();
        let den = 1.0 + d3(&a, &b) + d3(&b, &c) + d3(&c, &a);
        total += 2.0 * num.atan2(den);
    }
    total
}

impl FaceLattice {
    /// Builds the lattice of the convex hull of `points` (stride `d`);
    /// `None` if the hull is not full-dimensional.
    pub fn build(points: &[f64], d: usize) -> Option<Self> {
        let hull = convex_hull(points, d)?;
        let tol = 1e-9 * hull.scale;
        let volume = hull.volume(points);
        let nf = hull.facets.len();

        // Merge coplanar simplicial facets by flood fill across ridges.
        let mut ridge_map: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
        for (fi, f) in hull.facets.iter().enumerate() {
            for skip in 0..f.vertices.len() {
                let mut key: Vec<usize> = f
                    .vertices
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != skip)
                    .map(|(_, &v)| v)
                    .collect();
                key.sort_unstable();
                ridge_map.entry(key).or_default().push(fi);
            }
        }
        let mut neighbors: Vec<Vec<usize>> = vec![Vec::new(); nf];
        for list in ridge_map.values() {
            for &a in list {
                for &b in list {
                    if a != b {
                        neighbors[a].push(b);
                    }
                }
            }
        }
        let mut order: Vec<usize> = (0..nf).collect();
        order.sort_by(|&a, &b| hull.facets[b].measure.total_cmp(&hull.facets[a].measure));
        let mut label = vec![NONE; nf];
        let mut groups: Vec<(Vec<f64>, f64, Vec<usize>)> = Vec::new();
        for &seed in &order {
            if label[seed] != NONE {
                continue;
            }
            let g = groups.len();
            let sf = &hull.facets[seed];
            label[seed] = g;
            let mut verts: Vec<usize> = sf.vertices.clone();
            let mut stack = vec![seed];
            while let Some(f) = stack.pop() {
                for &h in &neighbors[f] {
                    if label[h] != NONE {
                        continue;
                    }
                    let hf = &hull.facets[h];
                    let coplanar = dot(&hf.normal, &sf.normal) > 1.0 - 1e-9
                        && hf.vertices.iter().all(|&v| {
                            (dot(&points[v * d..(v + 1) * d], &sf.normal) - sf.offset).abs() <= tol
                        });
                    if coplanar {
                        label[h] = g;
                        verts.extend_from_slice(&hf.vertices);
                        stack.push(h);
                    }
                }
            }
            verts.sort_unstable();
            verts.dedup();
            groups.push((sf.normal.clone(), sf.offset, verts));
        }

        // Keep only extreme points: those whose incident facet normals span R^d.
        let mut incident: HashMap<usize, Vec<usize>> = HashMap::new();
        for (g, (_, _, verts)) in groups.iter().enumerate() {
            for &v in verts {
                incident.entry(v).or_default().push(g);
            }
        }
        let mut candidates: Vec<usize> = incident.keys().copied().collect();
        candidates.sort_unstable();
        let mut new_index: HashMap<usize, usize> = HashMap::new();
        let mut kept = Vec::new();
        for v in candidates {
            let normals: Vec<&[f64]> = incident[&v]
                .iter()
                .map(|&g| groups[g].0.as_slice())
                .collect();
            if span_basis(&normals, 1e-7).len() == d {
                new_index.insert(v, kept.len());
                kept.push(v);
            }
        }
        let ext: Vec<f64> = kept
            .iter()
            .flat_map(|&v| points[v * d..(v + 1) * d].iter().copied())
            .collect();
        let facet_verts: Vec<Vec<usize>> = groups
            .iter()
            .map(|(_, _, verts)| {
                let mut vs: Vec<usize> = verts
                    .iter()
                    .filter_map(|v| new_index.get(v).copied())
                    .collect();
                vs.sort_unstable();
                vs
            })
            .collect();
        let mut vertex_facets: Vec<Vec<usize>> = vec![Vec::new(); kept.len()];
        for (g, vs) in facet_verts.iter().enumerate() {
            for &v in vs {
                vertex_facets[v].push(g);
            }
        }
        let containing = |verts: &[usize]| -> Vec<usize> {
            vertex_facets[verts[0]]
                .iter()
                .copied()
                .filter(|&g| {
                    verts
                        .iter()
                        .all(|v| facet_verts[g].binary_search(v).is_ok())
                })
                .collect()
        };

        let mut faces: Vec<Vec<Face>> = vec![Vec::new(); d];
        faces[0] = (0..kept.len())
            .map(|v| Face {
                vertices: vec![v],
                facets: vertex_facets[v].clone(),
                volume: 1.0,
            })
            .collect();
        if d >= 2 {
            faces[d - 1] = facet_verts
                .iter()
                .enumerate()
                .map(|(g, vs)| Face {
                    vertices: vs.clone(),
                    facets: vec![g],
                    volume: relative_volume(&ext, d, vs, d - 1),
                })
                .collect();
        }
        for k in (1..d.saturating_sub(1)).rev() {
            let upper = &faces[k + 1];
            let mut by_vertex: Vec<Vec<usize>> = vec![Vec::new(); kept.len()];
            for (fi, f) in upper.iter().enumerate() {
                for &v in &f.vertices {
                    by_vertex[v].push(fi);
                }
            }
            let mut seen: HashSet<Vec<usize>> = HashSet::new();
            let mut found = Vec::new();
            for list in &by_vertex {
                for (x, &a) in list.iter().enumerate() {
                    for &b in &list[x + 1..] {
                        let common = intersect_sorted(&upper[a].vertices, &upper[b].vertices);
                        if common.len() < k + 1 || !seen.insert(common.clone()) {
                            continue;
                        }
                        let sub: Vec<f64> = common
                            .iter()
                            .flat_map(|&i| ext[i * d..(i + 1) * d].iter().copied())
                            .collect();
                        if intrinsic_coordinates(&sub, d).1 == k {
                            let volume = relative_volume(&ext, d, &common, k);
                            let facets = containing(&common);
                            found.push(Face {
                                vertices: common,
                                facets,
                                volume,
                            });
                        }
                    }
                }
            }
            found.sort_by(|a, b| a.vertices.cmp(&b.vertices));
            faces[k] = found;
        }
        Some(Self {
            dim: d,
            points: ext,
            normals: groups.iter().map(|g| g.0.clone()).collect(),
            offsets: groups.iter().map(|g| g.1).collect(),
            faces,
            volume,
        })
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    pub fn facet_count(&self) -> usize {
        self.normals.len()
    }

    /// Outer normals of the facets containing `face`: the extreme rays of
    /// its normal cone.
    pub fn normal_cone(&self, face: &Face) -> Vec<&[f64]> {
        face.facets
            .iter()
            .map(|&g| self.normals[g].as_slice())
            .collect()
    }

    /// Spherical measure of the normal cone of a `k`-face intersected with
    /// the unit sphere of its linear span, for codimension 1 to 3.
    pub fn normal_cone_measure(&self, k: usize, face: &Face) -> Option<f64> {
        let gens = self.normal_cone(face);
        match self.dim - k {
            1 => Some(1.0),
            2 => {
                let mut best: f64 = 0.0;
                for a in &gens {
                    for b in &gens {
                        best = best.max(dot(a, b).clamp(-1.0, 1.0).acos());
                    }
                }
                Some(best)
            }
            3 => Some(cone_solid_angle(&gens)),
            _ => None,
        }
    }

    /// External angle: normal cone measure normalized by the total measure
    /// of the sphere in the cone's span.
    pub fn external_angle(&self, k: usize, face: &Face) -> Option<f64> {
        let total = match self.dim - k {
            1 => 2.0,
            2 => 2.0 * PI,
            3 => 4.0 * PI,
            _ => return None,
        };
        self.normal_cone_measure(k, face).map(|m| m / total)
    }

    /// Intrinsic volumes `V_0, …, V_d`.
    pub fn intrinsic_volumes(&self) -> Vec<f64> {
        let d = self.dim;
        let mut out = vec![0.0; d + 1];
        out[0] = 1.0;
        out[d] = self.volume;
        for k in 1..d {
            let parts: Vec<f64> = self.faces[k]
                .iter()
                .map(|f| f.volume * self.external_angle(k, f).expect("codimension at most 3"))
                .collect();
            out[k] = crate::stats::pairwise_sum(&parts);
        }
        out
    }
}
