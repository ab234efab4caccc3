//! Named Minkowski valuations, real valuations and Klain functions.

use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::crofton::{apply_crofton_minkowski, crofton_value, CroftonMeasure};
use crate::consts::{binom, kappa};
use crate::error::{invalid, Error, Result};
use crate::geometry::{
    hull_volume, minkowski_combine, project_volume, projected_intrinsic_volumes, Ball, BodyHandle,
    Polytope,
};
use crate::grassmann::{perp, radon_to_sphere, GrassmannFunction, GrassmannSample, Subspace};
use crate::linalg::{det_small, dot};
use crate::measures::{
    quermass_exact, quermass_steiner_fit, surface_area_measure, SteinerFitOptions,
};
use crate::sphere::{EstimatedFunction, SphereGrid, SphericalFunction};
use crate::stats::pairwise_sum;
use crate::stats::Estimate;

/// `h(ΠK, u) = ½ ∫ |u·v| dS_{n-1}(K, v)`.
pub fn projection_support_atoms(k: &Polytope, u: &[f64]) -> Result<f64> {
    Ok(0.5 * surface_area_measure(k)?.convolve_kernel(u, f64::abs))
}

/// `h(ΠK, u) = vol_{n-1}(K | u^⊥)`.
pub fn projection_support_direct(k: &Polytope, u: &[f64]) -> Result<f64> {
    project_volume(k, &perp(&Subspace::line(u)?)?)
}

/// `h(Π_i K, u) = V_i(K | u^⊥)`, exact.
pub fn pi_i_support(k: &Polytope, i: usize, u: &[f64]) -> Result<f64> {
    if i == 0 || i >= k.dim() {
        return invalid(format!("Π_i needs 1 ≤ i ≤ n-1, got i = {i}"));
    }
    Ok(projected_intrinsic_volumes(k, u)?[i])
}

/// `ΠK` as the zonotope `Σ_F [-½ a_F ν_F, ½ a_F ν_F]` over the facets.
/// Generators `g_F = vol_{n-1}(F) u_F` of `ΠK` with parallel facet normals
/// merged, so that `ΠK = Σ_F [-g_F/2, g_F/2]`.
pub fn projection_body_generators(k: &Polytope) -> Result<Vec<Vec<f64>>> {
    let s = surface_area_measure(k)?;
    let mut gens: Vec<(Vec<f64>, f64)> = Vec::new();
    for (u, a) in s.atoms() {
        let sign = if u.iter().find(|x| x.abs() > 1e-12).is_some_and(|x| *x < 0.0) {
            -1.0
        } else {
            1.0
        };
        let v: Vec<f64> = u.iter().map(|x| sign * x).collect();
        match gens
            .iter_mut()
            .find(|(g, _)| (dot(g, &v) - 1.0).abs() < 1e-12)
        {
            Some((_, len)) => *len += a,
            None => gens.push((v, a)),
        }
    }
    Ok(gens
        .into_iter()
        .map(|(g, len)| g.iter().map(|x| x * len).collect())
        .collect())
}

/// Volume of `Σ_j [-g_j/2, g_j/2]`: the sum of `|det|` over all `n`-subsets
/// of generators.
pub fn zonotope_volume(gens: &[Vec<f64>], n: usize) -> f64 {
    fn walk(
        gens: &[Vec<f64>],
        n: usize,
        start: usize,
        chosen: &mut Vec<usize>,
        terms: &mut Vec<f64>,
    ) {
        if chosen.len() == n {
            let mut m: Vec<f64> = chosen
                .iter()
                .flat_map(|&j| gens[j].iter().copied())
                .collect();
            terms.push(det_small(&mut m, n).abs());
            return;
        }
        for j in start..gens.len() {
            chosen.push(j);
            walk(gens, n, j + 1, chosen, terms);
            chosen.pop();
        }
    }
    let mut terms = Vec::new();
    walk(gens, n, 0, &mut Vec::with_capacity(n), &mut terms);
    pairwise_sum(&terms)
}

pub fn projection_body(k: &Polytope) -> Result<Polytope> {
    let n = k.dim();
    let mut pts = vec![0.0; n];
    for g in projection_body_generators(k)? {
        let mut next = Vec::with_capacity(2 * pts.len());
        for p in pts.chunks_exact(n) {
            for s in [-0.5, 0.5] {
                next.extend(p.iter().zip(&g).map(|(x, y)| x + s * y));
            }
        }
        pts = Polytope::from_flat(next, n)?.pruned().flat().to_vec();
    }
    Polytope::from_flat(pts, n)
}

/// `r(Π_i)` with `Π_i B = r B`: the `i`-th intrinsic volume of the unit
/// ball of `R^{n-1}`.
pub fn pi_i_radial_factor(n: usize, i: usize) -> f64 {
    binom(n - 1, i) * kappa(n - 1) / kappa(n - 1 - i)
}

pub fn difference_body(k: &Polytope) -> Result<Polytope> {
    match minkowski_combine(&[k.clone().into(), k.reflect().into()], &[1.0, 1.0], None)? {
        BodyHandle::Polytope(p) => Ok(p),
        _ => unreachable!("polytope sums stay polytopes"),
    }
}

/// How intrinsic volumes are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VolumeRoute {
    #[default]
    SteinerFit,
    Exact,
}

pub fn intrinsic_volume(k: &Polytope, i: usize, route: VolumeRoute) -> Result<f64> {
    match route {
        VolumeRoute::Exact => Ok(quermass_exact(k).intrinsic(i)),
        VolumeRoute::SteinerFit => Ok(quermass_steiner_fit(
            &k.clone().into(),
            &SteinerFitOptions::default(),
        )?
        .intrinsic(i)),
    }
}

/// `Λ_i K = V_i(K) B`.
pub fn lambda_i(k: &Polytope, i: usize, route: VolumeRoute) -> Result<Ball> {
    Ball::new(vec![0.0; k.dim()], intrinsic_volume(k, i, route)?)
}

/// `c · R_{n+1-i} vol_{n+1-i}(K | ·)`, the even part of the mean section
/// operator up to its normalizing constant.
pub fn mean_section_even(
    k: &Polytope,
    i: usize,
    c: f64,
    grid: Arc<SphereGrid>,
    inner: usize,
    seed: u64,
) -> Result<EstimatedFunction> {
    let n = k.dim();
    if i < 2 || i >= n {
        return invalid(format!("mean section order {i} outside 2..{n}"));
    }
    let j = n + 1 - i;
    let body = Arc::new(k.pruned());
    let f = GrassmannFunction::from_fn(j, move |e| project_volume(&body, e).unwrap_or(f64::NAN));
    let r = radon_to_sphere(&f, j, grid, inner, seed)?;
    let values: Vec<f64> = r.values().iter().map(|v| c * v).collect();
    let se = r.se.iter().map(|s| c.abs() * s).collect();
    Ok(EstimatedFunction {
        function: SphericalFunction::new(r.function.grid().clone(), values)?,
        se,
    })
}

/// A Minkowski valuation that can be applied to polytopes.
#[derive(Debug, Clone)]
pub enum MinkowskiValuation {
    FromCrofton(CroftonMeasure),
    ProjectionBody,
    ProjectionBodyI(usize),
    DifferenceBody,
    LambdaI(usize, VolumeRoute),
    MeanSectionEven {
        i: usize,
        c: f64,
        inner: usize,
        seed: u64,
    },
}

impl MinkowskiValuation {
    /// Degree of homogeneity in `R^n`.
    pub fn degree(&self, n: usize) -> usize {
        match self {
            Self::FromCrofton(s) => s.degree(),
            Self::ProjectionBody => n - 1,
            Self::ProjectionBodyI(i) | Self::LambdaI(i, _) => *i,
            Self::DifferenceBody => 1,
            Self::MeanSectionEven { i, .. } => n + 1 - i,
        }
    }

    pub fn name(&self) -> String {
        match self {
            Self::FromCrofton(s) => format!("crofton_{}", s.degree()),
            Self::ProjectionBody => "projection".into(),
            Self::ProjectionBodyI(i) => format!("pi_{i}"),
            Self::DifferenceBody => "difference".into(),
            Self::LambdaI(i, _) => format!("lambda_{i}"),
            Self::MeanSectionEven { i, .. } => format!("mean_section_even_{i}"),
        }
    }

    /// `ΦK` as an explicit body, when one is available without sampling.
    pub fn body(&self, k: &Polytope) -> Result<Option<BodyHandle>> {
        Ok(match self {
            Self::ProjectionBody => Some(projection_body(k)?.into()),
            Self::ProjectionBodyI(i) if *i + 1 == k.dim() => Some(projection_body(k)?.into()),
            Self::DifferenceBody => Some(difference_body(k)?.into()),
            Self::LambdaI(i, route) => Some(lambda_i(k, *i, *route)?.into()),
            _ => None,
        })
    }

    /// Exact `h(ΦK, u)` for the deterministic operators.
    pub fn support_at(&self, k: &Polytope, u: &[f64]) -> Result<Option<f64>> {
        Ok(match self {
            Self::ProjectionBodyI(i) => Some(pi_i_support(k, *i, u)?),
            Self::ProjectionBody => Some(projection_support_direct(k, u)?),
            Self::DifferenceBody => Some(project_volume(k, &Subspace::line(u)?)?),
            Self::LambdaI(..) => self.body(k)?.map(|b| b.support(u)),
            _ => None,
        })
    }

    /// `h(ΦK, ·)` tabulated on `grid`, with per-node standard errors.
    pub fn apply(&self, k: &Polytope, grid: Arc<SphereGrid>) -> Result<EstimatedFunction> {
        match self {
            Self::FromCrofton(s) => apply_crofton_minkowski(s, k, grid),
            Self::MeanSectionEven { i, c, inner, seed } => {
                mean_section_even(k, *i, *c, grid, *inner, *seed)
            }
            Self::LambdaI(i, route) => Ok(EstimatedFunction::exact(SphericalFunction::constant(
                grid,
                intrinsic_volume(k, *i, *route)?,
            ))),
            _ => {
                let k = k.pruned();
                let values = (0..grid.len())
                    .into_par_iter()
                    .map(|j| {
                        self.support_at(&k, grid.node(j))
                            .map(|v| v.expect("deterministic operator"))
                    })
                    .collect::<Result<Vec<f64>>>()?;
                Ok(EstimatedFunction::exact(SphericalFunction::new(
                    grid, values,
                )?))
            }
        }
    }
}

type Rule = Arc<dyn Fn(&Polytope) -> Result<Estimate> + Send + Sync>;

/// A translation-invariant real valuation of known degree.
#[derive(Clone)]
pub struct RealValuation {
    pub degree: usize,
    pub even: bool,
    rule: Rule,
}

impl std::fmt::Debug for RealValuation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "RealValuation(degree = {}, even = {})",
            self.degree, self.even
        )
    }
}

impl RealValuation {
    pub fn new(
        degree: usize,
        even: bool,
        rule: impl Fn(&Polytope) -> Result<Estimate> + Send + Sync + 'static,
    ) -> Self {
        Self {
            degree,
            even,
            rule: Arc::new(rule),
        }
    }

    /// `K ↦ ∫ vol_i(K | E) dσ(E)`.
    pub fn from_crofton(sigma: CroftonMeasure) -> Self {
        let degree = sigma.degree();
        Self::new(degree, true, move |k| crofton_value(&sigma, k))
    }

    /// `V_i`, from the face lattice.
    pub fn intrinsic_volume(i: usize) -> Self {
        Self::new(i, true, move |k| {
            Ok(Estimate::exact(k.intrinsic_volumes()[i]))
        })
    }

    pub fn eval(&self, k: &Polytope) -> Result<Estimate> {
        (self.rule)(k)
    }
}

/// `φ(P) / vol_i(P)` for a probe `P` given in the coordinates of `E`.
pub fn klain_function(phi: &RealValuation, e: &Subspace, probe: &Polytope) -> Result<Estimate> {
    let i = e.dim();
    if probe.dim() != i || phi.degree != i {
        return invalid("probe, subspace and valuation degree must agree");
    }
    let vol = if i == 1 {
        let xs = probe.flat();
        xs.iter().copied().fold(f64::NEG_INFINITY, f64::max)
            - xs.iter().copied().fold(f64::INFINITY, f64::min)
    } else {
        hull_volume(probe.flat(), i)
    };
    if !(vol > 0.0) {
        return invalid("Klain probe has zero volume");
    }
    let embedded: Vec<f64> = probe.vertices().flat_map(|y| e.embed(y)).collect();
    let body = Polytope::from_flat(embedded, e.n())?;
    Ok(phi.eval(&body)?.scale(1.0 / vol))
}

/// Operator as written in configuration files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum OperatorSpec {
    Projection,
    PiI {
        i: usize,
    },
    Difference,
    LambdaI {
        i: usize,
        #[serde(default)]
        route: VolumeRoute,
    },
    MeanSectionEven {
        i: usize,
        #[serde(default = "one")]
        c: f64,
        #[serde(default = "default_inner")]
        inner: usize,
    },
    Crofton {
        i: usize,
        sample_file: String,
        #[serde(default = "yes")]
        symmetrize: bool,
    },
}

fn one() -> f64 {
    1.0
}

fn yes() -> bool {
    true
}

fn default_inner() -> usize {
    512
}

impl OperatorSpec {
    /// Builds the operator; sample files are resolved against `base`.
    pub fn resolve(&self, base: &Path, seed: u64) -> Result<MinkowskiValuation> {
        Ok(match self {
            Self::Projection => MinkowskiValuation::ProjectionBody,
            Self::PiI { i } => MinkowskiValuation::ProjectionBodyI(*i),
            Self::Difference => MinkowskiValuation::DifferenceBody,
            Self::LambdaI { i, route } => MinkowskiValuation::LambdaI(*i, *route),
            Self::MeanSectionEven { i, c, inner } => MinkowskiValuation::MeanSectionEven {
                i: *i,
                c: *c,
                inner: *inner,
                seed,
            },
            Self::Crofton {
                i,
                sample_file,
                symmetrize,
            } => {
                let text = std::fs::read_to_string(base.join(sample_file))?;
                let sample = GrassmannSample::from_json(&serde_json::from_str(&text)?)?;
                if sample.i() != *i {
                    return Err(Error::InvalidInput(format!(
                        "sample file holds Gr_{{{},n}}, spec asks for i = {i}",
                        sample.i()
                    )));
                }
                MinkowskiValuation::FromCrofton(CroftonMeasure::new(sample, *symmetrize, seed))
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::random_polytope;
    use crate::grassmann::cosine_transform_at;
    use crate::linalg::random_unit;
    use crate::rng::stream;
    use crate::sphere::{build_sphere_grid, is_support_function, GridKind};

    #[test]
    fn cube_projection_body_routes() {
        let k = Polytope::unit_cube(3);
        let z = projection_body(&k).unwrap();
        let mut rng = stream(1, 0, 0);
        for _ in 0..200 {
            let u = random_unit(3, &mut rng);
            let u = u.as_slice();
            let expect: f64 = u.iter().map(|x| x.abs()).sum();
            assert!((projection_support_atoms(&k, u).unwrap() - expect).abs() < 1e-12);
            assert!((projection_support_direct(&k, u).unwrap() - expect).abs() < 1e-12);
            assert!((z.support(u) - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn zonotope_volume_matches_hull() {
        let k = random_polytope(3, 10, 3).unwrap();
        let gens = projection_body_generators(&k).unwrap();
        let z = projection_body(&k).unwrap();
        assert!((zonotope_volume(&gens, 3) - z.volume()).abs() < 1e-9 * z.volume());
        // ΠC for the unit cube is [-1, 1]^3.
        let cube = projection_body_generators(&Polytope::unit_cube(3)).unwrap();
        assert!((zonotope_volume(&cube, 3) - 8.0).abs() < 1e-12);
    }

    #[test]
    fn projection_body_routes_on_random_polytopes() {
        let k = random_polytope(3, 15, 7).unwrap();
        let z = projection_body(&k).unwrap();
        let mut rng = stream(2, 0, 0);
        for _ in 0..100 {
            let u = random_unit(3, &mut rng);
            let d = projection_support_direct(&k, u.as_slice()).unwrap();
            assert!((projection_support_atoms(&k, u.as_slice()).unwrap() - d).abs() < 1e-9 * d);
            assert!((z.support(u.as_slice()) - d).abs() < 1e-9 * d);
        }
    }

    #[test]
    fn pi_i_of_ball_polytope_and_evenness() {
        let k = random_polytope(3, 12, 3).unwrap();
        let mut rng = stream(3, 0, 0);
        for _ in 0..20 {
            let u = random_unit(3, &mut rng);
            for i in 1..3 {
                let a = pi_i_support(&k, i, u.as_slice()).unwrap();
                let b = pi_i_support(&k.reflect(), i, u.as_slice()).unwrap();
                assert!((a - b).abs() < 1e-12 * a.max(1.0));
            }
        }
    }

    #[test]
    fn difference_body_of_simplex() {
        let k = Polytope::standard_simplex(3);
        assert!((difference_body(&k).unwrap().volume() / k.volume() - 20.0).abs() < 1e-9);
    }

    #[test]
    fn lambda_one_of_cube() {
        let b = lambda_i(&Polytope::unit_cube(3), 1, VolumeRoute::SteinerFit).unwrap();
        assert!((b.radius - 3.0).abs() < 0.03);
    }

    #[test]
    fn mean_section_even_of_ball_like_body_is_support() {
        let grid = Arc::new(build_sphere_grid(3, 200, GridKind::Fibonacci, 1).unwrap());
        let k = random_polytope(3, 10, 2).unwrap();
        let m = mean_section_even(&k, 2, 1.0, grid.clone(), 32, 4).unwrap();
        let n = mean_section_even(&k.reflect(), 2, 1.0, grid, 32, 4).unwrap();
        for (a, b) in m.values().iter().zip(n.values()) {
            assert!((a - b).abs() < 1e-12);
        }
        let noise = 9.0 * m.se.iter().fold(0.0f64, |a, b| a.max(*b));
        let check = is_support_function(&m.function, 1000, noise, 5).unwrap();
        assert!(check.holds, "{:?}", check.witness);
    }

    #[test]
    fn klain_of_crofton_is_cosine_transform() {
        let sample = crate::grassmann::sample_grassmann(3, 2, 40, 6).unwrap();
        let weights: Vec<f64> = (0..40)
            .map(|k| if k % 3 == 0 { -0.02 } else { 0.04 })
            .collect();
        let sample = sample.with_weights(weights).unwrap();
        let phi = RealValuation::from_crofton(CroftonMeasure::new(sample.clone(), false, 0));
        let probe = Polytope::new(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.2, 0.7]]).unwrap();
        let probe2 = Polytope::unit_cube(2).scale(1.7);
        let mut rng = stream(7, 0, 0);
        for _ in 0..10 {
            let e = Subspace::random(3, 2, &mut rng);
            let a = klain_function(&phi, &e, &probe).unwrap().value;
            let b = klain_function(&phi, &e, &probe2).unwrap().value;
            let c = cosine_transform_at(&GrassmannFunction::constant(2, 1.0), &sample, &e)
                .unwrap()
                .value;
            assert!((a - b).abs() < 1e-9 && (a - c).abs() < 1e-9, "{a} {b} {c}");
        }
        let vol = RealValuation::intrinsic_volume(2);
        let e = Subspace::random(3, 2, &mut rng);
        assert!((klain_function(&vol, &e, &probe).unwrap().value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn operator_spec_parsing() {
        let s: OperatorSpec = serde_json::from_str(r#"{"op":"pi_i","i":2}"#).unwrap();
        assert_eq!(s, OperatorSpec::PiI { i: 2 });
        let c: OperatorSpec =
            serde_json::from_str(r#"{"op":"crofton","i":1,"sample_file":"s.json"}"#).unwrap();
        assert_eq!(
            c,
            OperatorSpec::Crofton {
                i: 1,
                sample_file: "s.json".into(),
                symmetrize: true
            }
        );
    }
}
