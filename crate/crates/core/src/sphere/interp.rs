//! Evaluation of tabulated spherical functions away from the grid nodes.
//!
//! On `S^2` values are interpolated linearly on the cones over the grid's
//! spherical triangulation (the convex hull of the nodes); on `S^3` an
//! inverse-distance average of the nearest nodes is used.

use std::f64::consts::PI;

use super::grid::SphereGrid;
use crate::geometry::hull::convex_hull;

const NONE: usize = usize::MAX;
const NEIGHBORS_S3: usize = 8;

#[derive(Debug)]
pub(crate) enum Interpolator {
    Cones(Triangulation),
    Nearest,
}

#[derive(Debug)]
pub(crate) struct Triangulation {
    tris: Vec<[usize; 3]>,
    /// Inverse of the matrix with columns the triangle's nodes.
    inverses: Vec<[f64; 9]>,
    /// `adj[t][k]` is the triangle across the edge opposite vertex `k`.
    adj: Vec<[usize; 3]>,
    node_tri: Vec<usize>,
    bins_z: usize,
    bins_phi: usize,
    bin_node: Vec<usize>,
}

fn invert3(m: [f64; 9]) -> Option<[f64; 9]> {
    let det = m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6])
        + m[2] * (m[3] * m[7] - m[4] * m[6]);
    if det.abs() < 1e-300 {
        return None;
    }
    let inv = [
        (m[4] * m[8] - m[5] * m[7]) / det,
        (m[2] * m[7] - m[1] * m[8]) / det,
        (m[1] * m[5] - m[2] * m[4]) / det,
        (m[5] * m[6] - m[3] * m[8]) / det,
        (m[0] * m[8] - m[2] * m[6]) / det,
        (m[2] * m[3] - m[0] * m[5]) / det,
        (m[3] * m[7] - m[4] * m[6]) / det,
        (m[1] * m[6] - m[0] * m[7]) / det,
        (m[0] * m[4] - m[1] * m[3]) / det,
    ];
    Some(inv)
}

impl Triangulation {
    fn build(grid: &SphereGrid) -> Option<Self> {
        let hull = convex_hull(grid.flat_nodes(), 3)?;
        let tris: Vec<[usize; 3]> = hull
            .facets
            .iter()
            .map(|f| [f.vertices[0], f.vertices[1], f.vertices[2]])
            .collect();
        let mut inverses = Vec::with_capacity(tris.len());
        for t in &tris {
            let (a, b, c) = (grid.node(t[0]), grid.node(t[1]), grid.node(t[2]));
            // Columns a, b, c in row-major layout.
            let m = [a[0], b[0], c[0], a[1], b[1], c[1], a[2], b[2], c[2]];
            inverses.push(invert3(m)?);
        }
        let mut edges: std::collections::HashMap<(usize, usize), Vec<(usize, usize)>> =
            std::collections::HashMap::new();
        for (ti, t) in tris.iter().enumerate() {
            for k in 0..3 {
                let (p, q) = (t[(k + 1) % 3], t[(k + 2) % 3]);
                edges.entry((p.min(q), p.max(q))).or_default().push((ti, k));
            }
        }
        let mut adj = vec![[NONE; 3]; tris.len()];
        for list in edges.values() {
            if let [(t1, k1), (t2, k2)] = list.as_slice() {
                adj[*t1][*k1] = *t2;
                adj[*t2][*k2] = *t1;
            }
        }
        let mut node_tri = vec![NONE; grid.len()];
        for (ti, t) in tris.iter().enumerate() {
            for &v in t {
                node_tri[v] = ti;
            }
        }
        let bins_z = ((grid.len() as f64 / 2.0).sqrt().ceil() as usize).max(1);
        let bins_phi = 2 * bins_z;
        let mut bin_node = vec![NONE; bins_z * bins_phi];
        for (k, v) in grid.nodes().enumerate() {
            if node_tri[k] == NONE {
                continue;
            }
            let b = bin_of(v, bins_z, bins_phi);
            if bin_node[b] == NONE {
                bin_node[b] = k;
            }
        }
        Some(Self {
            tris,
            inverses,
            adj,
            node_tri,
            bins_z,
            bins_phi,
            bin_node,
        })
    }

    fn barycentric(&self, t: usize, w: &[f64]) -> [f64; 3] {
        let m = &self.inverses[t];
        [
            m[0] * w[0] + m[1] * w[1] + m[2] * w[2],
            m[3] * w[0] + m[4] * w[1] + m[5] * w[2],
            m[6] * w[0] + m[7] * w[1] + m[8] * w[2],
        ]
    }

    /// Triangle whose cone contains `w`, with the cone coordinates of `w`.
    fn locate(&self, w: &[f64]) -> (usize, [f64; 3]) {
        let start_node = self.bin_node[bin_of(w, self.bins_z, self.bins_phi)];
        let mut t = if start_node != NONE {
            self.node_tri[start_node]
        } else {
            0
        };
        for _ in 0..4 * self.tris.len().max(16) {
            let l = self.barycentric(t, w);
            let (k, min) =
                l.iter().enumerate().fold(
                    (0, f64::INFINITY),
                    |acc, (k, &x)| if x < acc.1 { (k, x) } else { acc },
                );
            if min >= -1e-12 {
                return (t, l);
            }
            let next = self.adj[t][k];
            if next == NONE {
                break;
            }
            t = next;
        }
        // Walk failed (never expected on a closed triangulation): scan.
        let mut best = (0, [0.0; 3], f64::NEG_INFINITY);
        for ti in 0..self.tris.len() {
            let l = self.barycentric(ti, w);
            let m = l[0].min(l[1]).min(l[2]);
            if m > best.2 {
                best = (ti, l, m);
            }
        }
        (best.0, best.1)
    }
}

fn bin_of(v: &[f64], bins_z: usize, bins_phi: usize) -> usize {
    let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    let z = (v[2] / r).clamp(-1.0, 1.0);
    let bz = (((z + 1.0) / 2.0 * bins_z as f64) as usize).min(bins_z - 1);
    let phi = v[1].atan2(v[0]) + PI;
    let bp = ((phi / (2.0 * PI) * bins_phi as f64) as usize).min(bins_phi - 1);
    bz * bins_phi + bp
}

impl Interpolator {
    pub(crate) fn build(grid: &SphereGrid) -> Self {
        if grid.dim() == 3 {
            if let Some(t) = Triangulation::build(grid) {
                return Self::Cones(t);
            }
        }
        Self::Nearest
    }

    /// Interpolated value at the unit vector `w`.
    pub(crate) fn eval(&self, grid: &SphereGrid, values: &[f64], w: &[f64]) -> f64 {
        match self {
            Self::Cones(t) => {
                let (ti, l) = t.locate(w);
                let tri = t.tris[ti];
                l[0] * values[tri[0]] + l[1] * values[tri[1]] + l[2] * values[tri[2]]
            }
            Self::Nearest => {
                let k = NEIGHBORS_S3.min(grid.len());
                let mut best: Vec<(f64, usize)> = Vec::with_capacity(k + 1);
                for (j, v) in grid.nodes().enumerate() {
                    let d2: f64 = v.iter().zip(w).map(|(a, b)| (a - b) * (a - b)).sum();
                    if best.len() < k || d2 < best[best.len() - 1].0 {
                        let pos = best.partition_point(|e| e.0 <= d2);
                        best.insert(pos, (d2, j));
                        best.truncate(k);
                    }
                }
                if best[0].0 < 1e-24 {
                    return values[best[0].1];
                }
                let (mut num, mut den) = (0.0, 0.0);
                for (d2, j) in best {
                    let wt = 1.0 / d2;
                    num += wt * values[j];
                    den += wt;
                }
                num / den
            }
        }
    }
}
