//! Convex bodies: vertex-represented polytopes, balls, and bodies given by a
//! tabulated support function.

use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use super::faces::{intrinsic_coordinates, FaceLattice};
use super::hull::{convex_hull, hull_volume, planar_hull};
use crate::error::{invalid, Error, Result};
use crate::grassmann::Subspace;
use crate::linalg::{dot, norm, random_unit, Mat};
use crate::rng::{stream, tags};
use crate::sphere::{SphereGrid, SphericalFunction};

/// Allowed deviation of `|u|` from 1 in checked support evaluations.
pub const UNIT_TOL: f64 = 1e-12;

/// The convex hull of a finite, non-empty point set.
#[derive(Debug)]
pub struct Polytope {
    dim: usize,
    coords: Vec<f64>,
    lattice: OnceLock<Option<Arc<FaceLattice>>>,
}

impl Clone for Polytope {
    fn clone(&self) -> Self {
        let lattice = OnceLock::new();
        if let Some(l) = self.lattice.get() {
            let _ = lattice.set(l.clone());
        }
        Self {
            dim: self.dim,
            coords: self.coords.clone(),
            lattice,
        }
    }
}

impl PartialEq for Polytope {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.coords == other.coords
    }
}

impl Polytope {
    pub fn new(vertices: Vec<Vec<f64>>) -> Result<Self> {
        let Some(first) = vertices.first() else {
            return invalid("a polytope needs at least one vertex");
        };
        let dim = first.len();
        if vertices.iter().any(|v| v.len() != dim) {
            return invalid("vertices have inconsistent dimensions");
        }
        Self::from_flat(vertices.into_iter().flatten().collect(), dim)
    }

    /// Vertices given as one flat array with stride `dim`.
    pub fn from_flat(coords: Vec<f64>, dim: usize) -> Result<Self> {
        if dim == 0 || coords.is_empty() || !coords.len().is_multiple_of(dim) {
            return invalid("a polytope needs at least one vertex of positive dimension");
        }
        if coords.iter().any(|x| !x.is_finite()) {
            return invalid("vertex coordinates must be finite");
        }
        Ok(Self {
            dim,
            coords,
            lattice: OnceLock::new(),
        })
    }

    /// The box `[lo, hi]^n`.
    pub fn cube(n: usize, lo: f64, hi: f64) -> Self {
        let mut coords = Vec::with_capacity(n << n);
        for m in 0..(1usize << n) {
            for c in 0..n {
                coords.push(if (m >> c) & 1 == 1 { hi } else { lo });
            }
        }
        Self::from_flat(coords, n).expect("finite box")
    }

    /// `[0, 1]^n`.
    pub fn unit_cube(n: usize) -> Self {
        Self::cube(n, 0.0, 1.0)
    }

    /// `conv{0, e_1, …, e_n}`.
    pub fn standard_simplex(n: usize) -> Self {
        let mut coords = vec![0.0; n * (n + 1)];
        for k in 0..n {
            coords[(k + 1) * n + k] = 1.0;
        }
        Self::from_flat(coords, n).expect("finite simplex")
    }

    /// The segment `[a, b]`.
    pub fn segment(a: &[f64], b: &[f64]) -> Result<Self> {
        Self::new(vec![a.to_vec(), b.to_vec()])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn vertex(&self, k: usize) -> &[f64] {
        &self.coords[k * self.dim..(k + 1) * self.dim]
    }

    pub fn vertices(&self) -> impl ExactSizeIterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }

    pub fn flat(&self) -> &[f64] {
        &self.coords
    }

    /// `h(P, x) = max_v v·x`, for any `x`.
    pub fn support(&self, x: &[f64]) -> f64 {
        self.vertices()
            .map(|v| dot(v, x))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn volume(&self) -> f64 {
        match self.lattice() {
            Some(l) => l.volume,
            None => 0.0,
        }
    }

    pub fn affine_dim(&self) -> usize {
        intrinsic_coordinates(&self.coords, self.dim).1
    }

    pub fn map_vertices(&self, f: impl Fn(&[f64]) -> Vec<f64>) -> Self {
        let coords = self.vertices().flat_map(f).collect();
        Self::from_flat(coords, self.dim).expect("mapped vertices stay finite")
    }

    pub fn translate(&self, x: &[f64]) -> Self {
        self.map_vertices(|v| v.iter().zip(x).map(|(a, b)| a + b).collect())
    }

    pub fn scale(&self, lambda: f64) -> Self {
        self.map_vertices(|v| v.iter().map(|a| lambda * a).collect())
    }

    /// Image under the linear map `m`.
    pub fn transform(&self, m: &Mat) -> Self {
        self.map_vertices(|v| {
            (m * nalgebra::DVector::from_column_slice(v))
                .as_slice()
                .to_vec()
        })
    }

    /// `-P`.
    pub fn reflect(&self) -> Self {
        self.map_vertices(|v| v.iter().map(|a| -a).collect())
    }

    /// Mean of the vertex list.
    pub fn vertex_centroid(&self) -> Vec<f64> {
        let mut c = vec![0.0; self.dim];
        for v in self.vertices() {
            c.iter_mut().zip(v).for_each(|(a, b)| *a += b);
        }
        let m = self.len() as f64;
        c.iter_mut().for_each(|a| *a /= m);
        c
    }

    /// The same body with interior and duplicate vertices removed.
    pub fn pruned(&self) -> Self {
        let keep = extreme_indices(&self.coords, self.dim);
        let coords = keep
            .iter()
            .flat_map(|&k| self.vertex(k).iter().copied())
            .collect();
        Self::from_flat(coords, self.dim).expect("subset of finite vertices")
    }

    /// Face lattice, available when the polytope is full-dimensional.
    pub fn lattice(&self) -> Option<&FaceLattice> {
        self.lattice
            .get_or_init(|| FaceLattice::build(&self.coords, self.dim).map(Arc::new))
            .as_deref()
    }

    /// Intrinsic volumes `V_0, …, V_n`, exact up to rounding. Lower-dimensional
    /// polytopes are measured inside their affine hull.
    pub fn intrinsic_volumes(&self) -> Vec<f64> {
        let n = self.dim;
        let mut out = vec![0.0; n + 1];
        out[0] = 1.0;
        let (coords, r) = intrinsic_coordinates(&self.coords, n);
        match r {
            0 => {}
            1 => {
                let (lo, hi) = coords
                    .iter()
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| {
                        (a.min(x), b.max(x))
                    });
                out[1] = hi - lo;
            }
            _ if r == n => out.copy_from_slice(
                &self
                    .lattice()
                    .expect("full-dimensional")
                    .intrinsic_volumes(),
            ),
            _ => {
                let l =
                    FaceLattice::build(&coords, r).expect("full-dimensional in its affine hull");
                out[..=r].copy_from_slice(&l.intrinsic_volumes());
            }
        }
        out
    }

    /// `P ∩ {x : a·x ≤ b}`, or `None` if the intersection is empty.
    pub fn clip(&self, a: &[f64], b: f64) -> Option<Self> {
        let p = self.pruned();
        let side: Vec<f64> = p.vertices().map(|v| dot(a, v) - b).collect();
        let mut coords = Vec::new();
        for (v, &s) in p.vertices().zip(&side) {
            if s <= 0.0 {
                coords.extend_from_slice(v);
            }
        }
        // Every vertex of the cut lies on a segment between two vertices on
        // opposite sides; interior crossings are harmless extra points.
        for (j, (v, &sv)) in p.vertices().zip(&side).enumerate() {
            for (w, &sw) in p.vertices().zip(&side).skip(j + 1) {
                if (sv < 0.0 && sw > 0.0) || (sv > 0.0 && sw < 0.0) {
                    let t = sv / (sv - sw);
                    coords.extend(v.iter().zip(w).map(|(x, y)| x + t * (y - x)));
                }
            }
        }
        if coords.is_empty() {
            return None;
        }
        Some(
            Self::from_flat(coords, self.dim)
                .expect("finite cut")
                .pruned(),
        )
    }
}

/// Indices of the extreme points of the hull of `points`, in increasing order.
fn extreme_indices(points: &[f64], d: usize) -> Vec<usize> {
    let (coords, r) = intrinsic_coordinates(points, d);
    let count = points.len() / d;
    match r {
        0 => vec![0],
        1 => {
            let lo = (0..count)
                .min_by(|&a, &b| coords[a].total_cmp(&coords[b]))
                .unwrap();
            let hi = (0..count)
                .max_by(|&a, &b| coords[a].total_cmp(&coords[b]))
                .unwrap();
            let mut v = vec![lo, hi];
            v.sort_unstable();
            v
        }
        2 => {
            let mut v = planar_hull(&coords);
            v.sort_unstable();
            v
        }
        _ => convex_hull(&coords, r)
            .map(|h| h.vertices)
            .unwrap_or_else(|| (0..count).collect()),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Vec<f64>, radius: f64) -> Result<Self> {
        if !(radius >= 0.0) || !radius.is_finite() {
            return invalid("ball radius must be a nonnegative real");
        }
        if center.is_empty() || center.iter().any(|x| !x.is_finite()) {
            return invalid("ball center must be a finite point");
        }
        Ok(Self { center, radius })
    }

    /// The unit ball centered at the origin.
    pub fn unit(n: usize) -> Self {
        Self {
            center: vec![0.0; n],
            radius: 1.0,
        }
    }

    pub fn support(&self, x: &[f64]) -> f64 {
        dot(&self.center, x) + self.radius * norm(x)
    }
}

/// A body known through its support function on a sphere grid.
#[derive(Debug, Clone)]
pub struct SupportBody {
    pub function: SphericalFunction,
}

impl SupportBody {
    pub fn new(function: SphericalFunction) -> Self {
        Self { function }
    }

    /// 1-homogeneous extension of the interpolated support function.
    pub fn support(&self, x: &[f64]) -> f64 {
        let r = norm(x);
        if r == 0.0 {
            return 0.0;
        }
        let u: Vec<f64> = x.iter().map(|a| a / r).collect();
        r * self.function.eval(&u)
    }

    /// The polytope `∩_k {x : u_k·x ≤ h(u_k)}` over the grid nodes, built by
    /// dualizing around the Steiner point.
    pub fn circumscribed_polytope(&self) -> Result<Polytope> {
        let grid = self.function.grid();
        let n = grid.dim();
        let center = steiner_point(&BodyHandle::Support(self.clone()), grid)?;
        let mut dual = Vec::with_capacity(grid.len() * n);
        for (u, h) in grid.nodes().zip(self.function.values()) {
            let hc = h - dot(u, &center);
            if !(hc > 0.0) {
                return Err(Error::DegenerateBody(
                    "support values do not enclose the Steiner point".into(),
                ));
            }
            dual.extend(u.iter().map(|x| x / hc));
        }
        let hull = convex_hull(&dual, n)
            .ok_or_else(|| Error::DegenerateBody("flat dual point set".into()))?;
        let coords = hull
            .facets
            .iter()
            .flat_map(|f| {
                f.normal
                    .iter()
                    .zip(&center)
                    .map(|(a, c)| a / f.offset + c)
                    .collect::<Vec<_>>()
            })
            .collect();
        Ok(Polytope::from_flat(coords, n)?.pruned())
    }
}

#[derive(Debug, Clone)]
pub enum BodyHandle {
    Polytope(Polytope),
    Ball(Ball),
    Support(SupportBody),
}

impl From<Polytope> for BodyHandle {
    fn from(p: Polytope) -> Self {
        Self::Polytope(p)
    }
}

impl From<Ball> for BodyHandle {
    fn from(b: Ball) -> Self {
        Self::Ball(b)
    }
}

impl From<SupportBody> for BodyHandle {
    fn from(s: SupportBody) -> Self {
        Self::Support(s)
    }
}

impl BodyHandle {
    pub fn dim(&self) -> usize {
        match self {
            Self::Polytope(p) => p.dim(),
            Self::Ball(b) => b.center.len(),
            Self::Support(s) => s.function.dim(),
        }
    }

    /// 1-homogeneous support function at any `x`.
    pub fn support(&self, x: &[f64]) -> f64 {
        match self {
            Self::Polytope(p) => p.support(x),
            Self::Ball(b) => b.support(x),
            Self::Support(s) => s.support(x),
        }
    }

    /// `h(-K, ·)`.
    pub fn reflect(&self) -> Self {
        match self {
            Self::Polytope(p) => Self::Polytope(p.reflect()),
            Self::Ball(b) => Self::Ball(Ball {
                center: b.center.iter().map(|x| -x).collect(),
                radius: b.radius,
            }),
            Self::Support(s) => {
                let f = &s.function;
                let g = SphericalFunction::from_fn(f.grid().clone(), |u| {
                    let v: Vec<f64> = u.iter().map(|x| -x).collect();
                    f.eval(&v)
                });
                Self::Support(SupportBody::new(g))
            }
        }
    }

    /// Support values on the nodes of `grid`.
    pub fn tabulate(&self, grid: Arc<SphereGrid>) -> SphericalFunction {
        if let Self::Support(s) = self {
            if *s.function.grid() == grid {
                return s.function.clone();
            }
        }
        SphericalFunction::from_fn(grid, |u| self.support(u))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let file = match self {
            Self::Polytope(p) => BodyFile::Polytope {
                dim: p.dim(),
                vertices: p.vertices().map(|v| v.to_vec()).collect(),
            },
            Self::Ball(b) => BodyFile::Ball {
                center: b.center.clone(),
                radius: b.radius,
            },
            Self::Support(s) => BodyFile::Support {
                grid: s.function.grid().to_json(),
                values: s.function.values().to_vec(),
            },
        };
        serde_json::to_value(file).expect("body serializes")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let file: BodyFile = serde_json::from_value(value.clone())?;
        Ok(match file {
            BodyFile::Polytope { dim, vertices } => {
                let p = Polytope::new(vertices)?;
                if p.dim() != dim {
                    return invalid(format!(
                        "declared dim {dim} but vertices have dimension {}",
                        p.dim()
                    ));
                }
                Self::Polytope(p)
            }
            BodyFile::Ball { center, radius } => Self::Ball(Ball::new(center, radius)?),
            BodyFile::Support { grid, values } => {
                let grid = Arc::new(SphereGrid::from_json(&grid)?);
                Self::Support(SupportBody::new(SphericalFunction::new(grid, values)?))
            }
        })
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
enum BodyFile {
    Polytope {
        dim: usize,
        vertices: Vec<Vec<f64>>,
    },
    Ball {
        center: Vec<f64>,
        radius: f64,
    },
    Support {
        grid: serde_json::Value,
        values: Vec<f64>,
    },
}

/// `h(K, u)` for a unit vector `u`.
pub fn support_eval(body: &BodyHandle, u: &[f64]) -> Result<f64> {
    if u.len() != body.dim() {
        return invalid(format!(
            "direction of dimension {} for a body in R^{}",
            u.len(),
            body.dim()
        ));
    }
    if (norm(u) - 1.0).abs() > UNIT_TOL {
        return invalid("support_eval needs a unit direction");
    }
    Ok(body.support(u))
}

/// `Σ λ_k K_k`. Polytopes combine into the polytope of weighted vertex sums
/// and balls into a ball; any other mix is tabulated on `grid`, or on the
/// grid of the first support body if `grid` is `None`.
pub fn minkowski_combine(
    bodies: &[BodyHandle],
    coeffs: &[f64],
    grid: Option<Arc<SphereGrid>>,
) -> Result<BodyHandle> {
    if bodies.is_empty() || bodies.len() != coeffs.len() {
        return invalid("need one coefficient per body");
    }
    if coeffs.iter().any(|c| !(*c >= 0.0)) {
        return invalid("Minkowski coefficients must be nonnegative");
    }
    let n = bodies[0].dim();
    if bodies.iter().any(|b| b.dim() != n) {
        return invalid("bodies live in different dimensions");
    }
    if bodies.iter().all(|b| matches!(b, BodyHandle::Polytope(_))) {
        let mut acc = vec![0.0; n];
        for (b, &c) in bodies.iter().zip(coeffs) {
            let BodyHandle::Polytope(p) = b else {
                unreachable!()
            };
            let p = p.pruned();
            let mut next = Vec::with_capacity(acc.len() * p.len());
            for a in acc.chunks_exact(n) {
                for v in p.vertices() {
                    next.extend(a.iter().zip(v).map(|(x, y)| x + c * y));
                }
            }
            acc = Polytope::from_flat(next, n)?.pruned().coords;
        }
        return Ok(BodyHandle::Polytope(Polytope::from_flat(acc, n)?));
    }
    if bodies.iter().all(|b| matches!(b, BodyHandle::Ball(_))) {
        let mut center = vec![0.0; n];
        let mut radius = 0.0;
        for (b, &c) in bodies.iter().zip(coeffs) {
            let BodyHandle::Ball(b) = b else {
                unreachable!()
            };
            center
                .iter_mut()
                .zip(&b.center)
                .for_each(|(x, y)| *x += c * y);
            radius += c * b.radius;
        }
        return Ok(BodyHandle::Ball(Ball::new(center, radius)?));
    }
    let grid = grid
        .or_else(|| {
            bodies.iter().find_map(|b| match b {
                BodyHandle::Support(s) => Some(s.function.grid().clone()),
                _ => None,
            })
        })
        .ok_or_else(|| Error::InvalidInput("mixed Minkowski combination needs a grid".into()))?;
    let mut values = vec![0.0; grid.len()];
    for (b, &c) in bodies.iter().zip(coeffs) {
        let f = b.tabulate(grid.clone());
        values
            .iter_mut()
            .zip(f.values())
            .for_each(|(x, y)| *x += c * y);
    }
    Ok(BodyHandle::Support(SupportBody::new(
        SphericalFunction::new(grid, values)?,
    )))
}

/// Coordinates of the vertices of `p` projected onto `e`, in the frame of `e`.
pub fn project_coordinates(p: &Polytope, e: &Subspace) -> Vec<f64> {
    let mut out = Vec::with_capacity(p.len() * e.dim());
    for v in p.vertices() {
        out.extend(e.coordinates(v));
    }
    out
}

/// `vol_i(P | E)`.
pub fn project_volume(p: &Polytope, e: &Subspace) -> Result<f64> {
    if e.n() != p.dim() {
        return invalid(format!(
            "subspace of R^{} for a polytope in R^{}",
            e.n(),
            p.dim()
        ));
    }
    let coords = project_coordinates(p, e);
    Ok(match e.dim() {
        1 => {
            let (lo, hi) = coords
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| {
                    (a.min(x), b.max(x))
                });
            hi - lo
        }
        i => hull_volume(&coords, i),
    })
}

/// Intrinsic volumes `V_0, …, V_{n-1}` of `P | u^⊥`, computed exactly in
/// the hyperplane.
pub fn projected_intrinsic_volumes(p: &Polytope, u: &[f64]) -> Result<Vec<f64>> {
    let line = Subspace::line(u)?;
    let h = crate::grassmann::perp(&line)?;
    let coords = project_coordinates(p, &h);
    Ok(Polytope::from_flat(coords, p.dim() - 1)?.intrinsic_volumes())
}

/// `s(K) = n ∫ h(K, u) u du` by quadrature on `grid`.
pub fn steiner_point(body: &BodyHandle, grid: &SphereGrid) -> Result<Vec<f64>> {
    let n = body.dim();
    if grid.dim() != n {
        return Err(Error::GridMismatch(format!(
            "grid on S^{} for a body in R^{n}",
            grid.dim() - 1
        )));
    }
    let h: Vec<f64> = grid.nodes().map(|u| body.support(u)).collect();
    Ok((0..n)
        .map(|c| {
            let terms: Vec<f64> = grid.nodes().zip(&h).map(|(u, hv)| hv * u[c]).collect();
            n as f64 * grid.integrate(&terms)
        })
        .collect())
}

/// Smallest volume accepted from [`random_polytope`].
pub const MIN_RANDOM_VOLUME: f64 = 1e-6;

/// `conv` of `count` i.i.d. uniform points on `S^{n-1}`; resampled until the
/// hull has volume at least [`MIN_RANDOM_VOLUME`].
pub fn random_polytope(n: usize, count: usize, seed: u64) -> Result<Polytope> {
    if count < n + 1 {
        return invalid(format!("need at least {} vertices in R^{n}", n + 1));
    }
    for attempt in 0.. {
        let mut rng = stream(seed, tags::POLYTOPE, attempt);
        let coords: Vec<f64> = (0..count)
            .flat_map(|_| random_unit(n, &mut rng).as_slice().to_vec())
            .collect();
        if hull_volume(&coords, n) >= MIN_RANDOM_VOLUME {
            return Polytope::from_flat(coords, n);
        }
    }
    unreachable!()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::{build_sphere_grid, GridKind};

    fn simplex_body() -> BodyHandle {
        Polytope::standard_simplex(3).into()
    }

    #[test]
    fn support_values() {
        let cube: BodyHandle = Polytope::cube(3, -1.0, 1.0).into();
        assert_eq!(support_eval(&cube, &[1.0, 0.0, 0.0]).unwrap(), 1.0);
        let ball: BodyHandle = Ball::unit(3).into();
        assert!((support_eval(&ball, &[0.6, 0.8, 0.0]).unwrap() - 1.0).abs() < 1e-15);
        let s = 1.0 / 3f64.sqrt();
        assert!((support_eval(&simplex_body(), &[s, s, s]).unwrap() - s).abs() < 1e-15);
        assert!(support_eval(&cube, &[1.0, 1.0, 0.0]).is_err());
    }

    #[test]
    fn square_from_segments() {
        let a = Polytope::segment(&[-1.0, 0.0], &[1.0, 0.0]).unwrap();
        let b = Polytope::segment(&[0.0, -1.0], &[0.0, 1.0]).unwrap();
        let sq = minkowski_combine(&[a.into(), b.into()], &[1.0, 1.0], None).unwrap();
        let u = [0.5f64.sqrt(), 0.5f64.sqrt()];
        assert!((sq.support(&u) - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn simplex_difference_body_volume_ratio() {
        let k = Polytope::standard_simplex(3);
        let d =
            minkowski_combine(&[k.clone().into(), k.reflect().into()], &[1.0, 1.0], None).unwrap();
        let BodyHandle::Polytope(d) = d else { panic!() };
        assert!((d.volume() / k.volume() - 20.0).abs() < 1e-9);
    }

    #[test]
    fn zero_coefficient_keeps_first_body() {
        let k = random_polytope(3, 12, 1).unwrap();
        let l = random_polytope(3, 12, 2).unwrap();
        let c = minkowski_combine(&[k.clone().into(), l.into()], &[1.0, 0.0], None).unwrap();
        let mut rng = stream(3, 0, 0);
        for _ in 0..50 {
            let u = random_unit(3, &mut rng);
            assert!((c.support(u.as_slice()) - k.support(u.as_slice())).abs() < 1e-12);
        }
    }

    #[test]
    fn width_is_sum_of_reflected_supports() {
        let k = random_polytope(3, 15, 4).unwrap();
        let mut rng = stream(5, 0, 0);
        for _ in 0..20 {
            let u = random_unit(3, &mut rng);
            let line = Subspace::line(u.as_slice()).unwrap();
            let width = project_volume(&k, &line).unwrap();
            let sum = k.support(u.as_slice()) + k.reflect().support(u.as_slice());
            assert!((width - sum).abs() < 1e-12);
        }
    }

    #[test]
    fn projection_volumes() {
        let cube = Polytope::cube(3, -1.0, 1.0);
        assert!((project_volume(&cube, &Subspace::pole(3, 2)).unwrap() - 4.0).abs() < 1e-12);
        let s = 1.0 / 3f64.sqrt();
        let h = crate::grassmann::perp(&Subspace::line(&[s, s, s]).unwrap()).unwrap();
        assert!((project_volume(&Polytope::unit_cube(3), &h).unwrap() - 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn hull_volume_cases() {
        assert!((Polytope::unit_cube(3).volume() - 1.0).abs() < 1e-14);
        assert!((Polytope::standard_simplex(3).volume() - 1.0 / 6.0).abs() < 1e-15);
        assert_eq!(hull_volume(&[0.0, 0.0, 0.0, 1.0, 1.0, 1.0], 3), 0.0);
    }

    #[test]
    fn intrinsic_volumes_of_flat_bodies() {
        let square = Polytope::new(vec![
            vec![0.0, 0.0, 1.0],
            vec![1.0, 0.0, 1.0],
            vec![0.0, 1.0, 1.0],
            vec![1.0, 1.0, 1.0],
        ])
        .unwrap();
        let v = square.intrinsic_volumes();
        assert!((v[1] - 2.0).abs() < 1e-12 && (v[2] - 1.0).abs() < 1e-12 && v[3] == 0.0);
        let seg = Polytope::segment(&[0.0, 0.0, 0.0], &[0.0, 3.0, 4.0]).unwrap();
        assert!((seg.intrinsic_volumes()[1] - 5.0).abs() < 1e-12);
    }

    #[test]
    fn cube_hyperplane_projection_intrinsic_volumes() {
        let v = projected_intrinsic_volumes(&Polytope::unit_cube(3), &[1.0, 0.0, 0.0]).unwrap();
        assert!((v[1] - 2.0).abs() < 1e-12 && (v[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pruning_keeps_support() {
        let mut verts: Vec<Vec<f64>> = Polytope::unit_cube(3)
            .vertices()
            .map(|v| v.to_vec())
            .collect();
        verts.push(vec![0.5, 0.5, 0.5]);
        verts.push(vec![1.0, 1.0, 1.0]);
        let p = Polytope::new(verts).unwrap();
        let q = p.pruned();
        assert_eq!(q.len(), 8);
        let mut rng = stream(6, 0, 0);
        for _ in 0..20 {
            let u = random_unit(3, &mut rng);
            assert_eq!(p.support(u.as_slice()), q.support(u.as_slice()));
        }
    }

    #[test]
    fn clipping_a_cube_in_half() {
        let cube = Polytope::unit_cube(3);
        let left = cube.clip(&[1.0, 0.0, 0.0], 0.5).unwrap();
        assert!((left.volume() - 0.5).abs() < 1e-12);
        assert!(cube.clip(&[1.0, 0.0, 0.0], -1.0).is_none());
    }

    #[test]
    fn random_polytopes_are_seeded() {
        let a = random_polytope(3, 20, 9).unwrap();
        let b = random_polytope(3, 20, 9).unwrap();
        let c = random_polytope(3, 20, 10).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(a.volume() > 0.0);
    }

    #[test]
    fn steiner_point_of_ball_is_center() {
        let grid = build_sphere_grid(3, 2000, GridKind::Fibonacci, 1).unwrap();
        let ball: BodyHandle = Ball::new(vec![0.3, -0.2, 0.1], 2.0).unwrap().into();
        let s = steiner_point(&ball, &grid).unwrap();
        for (a, b) in s.iter().zip([0.3, -0.2, 0.1]) {
            assert!((a - b).abs() < 1e-3);
        }
    }

    #[test]
    fn circumscribed_polytope_of_tabulated_cube() {
        let grid = Arc::new(build_sphere_grid(3, 500, GridKind::Fibonacci, 2).unwrap());
        let cube = Polytope::cube(3, -1.0, 1.0);
        let f = SphericalFunction::from_fn(grid, |u| cube.support(u));
        let p = SupportBody::new(f).circumscribed_polytope().unwrap();
        assert!(
            p.volume() >= 8.0 - 1e-9 && p.volume() < 10.0,
            "{}",
            p.volume()
        );
    }

    #[test]
    fn json_round_trip() {
        let k: BodyHandle = Polytope::new(vec![vec![0.1, 0.2, 0.3], vec![1.5, -2.25, 0.0]])
            .unwrap()
            .into();
        let back = BodyHandle::from_json(&k.to_json()).unwrap();
        let (BodyHandle::Polytope(a), BodyHandle::Polytope(b)) = (&k, &back) else {
            panic!()
        };
        assert_eq!(a, b);
        let ball: BodyHandle = Ball::new(vec![0.1, 0.0, 0.7], 1.3).unwrap().into();
        let text = serde_json::to_string(&ball.to_json()).unwrap();
        assert_eq!(
            text,
            r#"{"center":[0.1,0.0,0.7],"radius":1.3,"type":"ball"}"#
        );
    }
}
