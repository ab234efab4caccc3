//! Identity checks: convolution calculus, transforms, and two-route
//! agreement of operators and mixed volumes.

use std::sync::Arc;

use rand::Rng as _;
use rayon::prelude::*;

use super::config::SuiteConfig;
use super::result::{CheckResult, Relation};
use super::runner::{check_result, instance_seed, CheckSpec, Instance, Outcome, Suite};
use crate::error::Result;
use crate::geometry::{project_volume, random_polytope, Polytope};
use crate::grassmann::{
    convolve_measures, cosine, cosine_transform_at, lifted_convolve_grassmann,
    lifted_convolve_sphere, principal_cosines, radon_to_sphere, rotation_mapping_pole,
    sample_grassmann, GrassmannFunction, GrassmannSample, RotationSample, Subspace,
};
use crate::linalg::{haar_orthogonal, random_unit, Mat};
use crate::measures::{mixed_quermass_pair, mixed_volume_fit, quermass_exact, AreaOptions};
use crate::rng::{derive_seed, stream, tags};
use crate::sphere::{
    approximate_identity, build_sphere_grid, convolve_field_at, convolve_zonal, ConvolutionRule,
    GridKind, SphereGrid, SphericalFunction, ZonalProfile,
};
use crate::stats::{pairwise_sum, Estimate};
use crate::valuations::{
    apply_crofton_minkowski, klain_function, pi_i_constant, pi_i_support, projection_support_atoms,
    projection_support_direct, CroftonMeasure, RealValuation,
};

const EQUIVARIANCE_BODIES: usize = 4;
const EQUIVARIANCE_DIRECTIONS: usize = 8;
const ADJOINT_MEASURES: usize = 4;
const ADJOINT_ROTATIONS: usize = 32;
const ADJOINT_MAX_SAMPLES: usize = 4000;
const ANTI_HOM_MEASURES: usize = 4;
const ANTI_HOM_ROTATIONS: usize = 16;
const HAT_ROTATIONS: usize = 1000;
const HAT_TOL: f64 = 1e-9;
const DIRAC_MAX_NODES: usize = 2000;
const DIRAC_ROTATIONS: usize = 200;
const APPROX_MAX_NODES: usize = 400;
const APPROX_ORDERS: [u32; 3] = [4, 8, 16];
const KLAIN_MEASURES: usize = 5;
const KLAIN_MEASURE_SIZE: usize = 200;
const KLAIN_TARGETS: usize = 50;
const SELF_ADJOINT_MAX_SAMPLES: usize = 300;
const RADON_NODES: usize = 16;
const PI_I_NODES: usize = 16;
const PI_I_MAX_BODIES: usize = 10;
const CROFTON_BODIES: usize = 4;
const CROFTON_NODES: usize = 100;
const CROFTON_SUBSPACES: usize = 64;
const PROJECTION_CUBE_DIRECTIONS: usize = 1000;
const PROJECTION_DIRECTIONS: usize = 100;
const PROJECTION_CUBE_TOL: f64 = 1e-9;
const PROJECTION_REL_TOL: f64 = 1e-6;
const FIT_MAX_RESIDUAL: f64 = 1e-6;

pub fn identity_checks() -> Vec<CheckSpec> {
    vec![
        CheckSpec {
            id: "convolution.equivariance",
            anchor: "(ϑf) ∗ μ = ϑ(f ∗ μ)",
            instances: |_| EQUIVARIANCE_BODIES,
            run: equivariance,
        },
        CheckSpec {
            id: "convolution.adjoint",
            anchor: "⟨g ∗ σ, f⟩ = ⟨g, f ∗ σ̂⟩",
            instances: |_| ADJOINT_MEASURES,
            run: adjoint,
        },
        CheckSpec {
            id: "convolution.anti_homomorphism",
            anchor: "(μ ∗ σ)^ = σ̂ ∗ μ̂",
            instances: |_| ANTI_HOM_MEASURES,
            run: anti_homomorphism,
        },
        CheckSpec {
            id: "convolution.hat_invariant",
            anchor: "f(ϑ^{-1}Ē) = f(ϑĒ) for O(i) × O(n-i) invariant f",
            instances: |cfg| cfg.degrees().len(),
            run: hat_invariant,
        },
        CheckSpec {
            id: "convolution.dirac",
            anchor: "f ∗ δ_ē = f",
            instances: |cfg| 2 + cfg.degrees().len(),
            run: dirac,
        },
        CheckSpec {
            id: "convolution.approximate_identity",
            anchor: "sup |g ∗ f_m - g| decreases in m",
            instances: |_| APPROX_ORDERS.len() - 1,
            run: approximate_identity_convergence,
        },
        CheckSpec {
            id: "klain.cosine_transform",
            anchor: "Kl_φ = C_i σ",
            instances: |cfg| KLAIN_MEASURES * cfg.degrees().len(),
            run: klain_cosine,
        },
        CheckSpec {
            id: "cosine.self_adjoint",
            anchor: "⟨C_i f, g⟩ = ⟨f, C_i g⟩",
            instances: |cfg| cfg.degrees().len(),
            run: cosine_self_adjoint,
        },
        CheckSpec {
            id: "radon.lifted_convolution",
            anchor: "R_i f = f ∗ ν_{S^{i-1}}",
            instances: |cfg| cfg.degrees().len(),
            run: radon_lifted,
        },
        CheckSpec {
            id: "pi_i.two_routes",
            anchor: "h(Π_iK, u) = c_{n,i} R_{n-i}(vol_i(K|·^⊥))(u) = V_i(K|u^⊥)",
            instances: |cfg| cfg.bodies.min(PI_I_MAX_BODIES) * cfg.degrees().len(),
            run: pi_i_two_routes,
        },
        CheckSpec {
            id: "crofton.pi_i",
            anchor: "h(Π_iK, ·) = vol_i(K|·) ∗ μ",
            instances: |cfg| (1 + CROFTON_BODIES) * cfg.degrees().len(),
            run: crofton_pi_i,
        },
        CheckSpec {
            id: "projection_body.two_routes",
            anchor: "½∫|u·v| dS_{n-1}(K, v) = vol_{n-1}(K|u^⊥)",
            instances: |cfg| 1 + cfg.bodies,
            run: projection_two_routes,
        },
        CheckSpec {
            id: "mixed_volume.polynomial_oracle",
            anchor: "(1/n)∫h(L, ·) dS_{n-1}(K, ·) = V(K[n-1], L)",
            instances: |cfg| cfg.bodies,
            run: mixed_polynomial_oracle,
        },
        CheckSpec {
            id: "mixed_volume.self_pairing",
            anchor: "(1/n)∫h(K, ·) dS_i(K, ·) = W_{n-1-i}(K)",
            instances: |cfg| cfg.bodies * cfg.degrees().len(),
            run: mixed_self_pairing,
        },
    ]
}

/// Checks that are expected to fail; used to exercise the witness path.
pub(crate) fn sanity_checks() -> Vec<CheckSpec> {
    vec![PERTURBED_SELF_ADJOINT]
}

const PERTURBED_SELF_ADJOINT: CheckSpec = CheckSpec {
    id: "cosine.self_adjoint.perturbed",
    anchor: "⟨C f, g⟩ = ⟨f, C g⟩ with kernel |cos(E, F)|(1 + 2|Pr_F e_1|²)",
    instances: |_| 1,
    run: perturbed_self_adjoint,
};

fn body(cfg: &SuiteConfig, inst: &Instance, k: u64) -> Result<Polytope> {
    random_polytope(
        cfg.n,
        cfg.vertices,
        derive_seed(inst.seed, tags::POLYTOPE, k),
    )
}

fn fibonacci(n: usize, count: usize) -> Result<Arc<SphereGrid>> {
    Ok(Arc::new(build_sphere_grid(
        n,
        count,
        GridKind::Fibonacci,
        0,
    )?))
}

/// `count` random directions as an equal-weight point set.
fn probe_directions(n: usize, count: usize, seed: u64) -> Result<Arc<SphereGrid>> {
    let mut rng = stream(seed, tags::GRID, 0);
    let nodes = (0..count)
        .map(|_| random_unit(n, &mut rng).as_slice().to_vec())
        .collect();
    Ok(Arc::new(SphereGrid::from_parts(
        n,
        nodes,
        vec![1.0; count],
    )?))
}

/// `(degree, j)` for checks with `per` instances per degree.
fn split_degree(cfg: &SuiteConfig, index: usize, per: usize) -> (usize, usize) {
    (cfg.degrees()[index / per], index % per)
}

fn column(m: &Mat, c: usize) -> Vec<f64> {
    m.column(c).iter().copied().collect()
}

fn equivariance(cfg: &SuiteConfig, inst: &Instance) -> Result<Outcome> {
    let n = cfg.n;
    let k = body(cfg, inst, 0)?;
    let theta = haar_orthogonal(n, &mut stream(inst.seed, tags::ROTATION, 0));
    let rotated = k.transform(&theta);
    let zeta = ZonalProfile::half_abs();
    let rule = ConvolutionRule::for_dim(n);
    let mut rng = stream(inst.seed, tags::GRID, 0);
    let mut outcomes = Vec::with_capacity(EQUIVARIANCE_DIRECTIONS);
    for _ in 0..EQUIVARIANCE_DIRECTIONS {
        let u = random_unit(n, &mut rng);
        let v = theta.transpose() * &u;
        let a = convolve_field_at(&|x| rotated.support(x), u.as_slice(), &zeta, rule);
        let b = convolve_field_at(&|x| k.support(x), v.as_slice(), &zeta, rule);
        let se = a.combined_se(&b);
        outcomes.push(Outcome::eq(a.value, b.value, se, cfg.se_tolerance(se)));
    }
    Ok(Outcome::worst(outcomes)?.with_bodies(vec![k.into()]))
}

fn signed_weights(count: usize, seed: u64) -> Vec<f64> {
    let mut rng = stream(seed, tags::ROTATION, u64::MAX);
    (0..count)
        .map(|_| rng.random_range(-0.5..1.0) / count as f64)
        .collect()
}

fn adjoint(cfg: &SuiteConfig, inst: &Instance) -> Result<Outcome> {
    let n = cfg.n;
    let k = body(cfg, inst, 0)?;
    let haar = RotationSample::haar(
        n,
        ADJOINT_ROTATIONS,
        derive_seed(inst.seed, tags::ROTATION, 0),
    );
    let sigma = RotationSample::new(
        haar.rotations().to_vec(),
        signed_weights(ADJOINT_ROTATIONS, inst.seed),
    )?;
    let sigma_hat = sigma.hat();
    let g = |u: &[f64]| u[0] * u[0] + u[1];
    let f = |u: &[f64]| k.support(u);
    let m = cfg.gr_samples.min(ADJOINT_MAX_SAMPLES);
    let eta_seed = derive_seed(inst.seed, tags::ROTATION, 1);
    // ⟨F, G⟩ over O(n) for F, G lifted from the sphere, by Haar sampling of η.
    let terms: Vec<(f64, f64)> = (0..m)
        .into_par_iter()
        .map(|j| {
            let eta = haar_orthogonal(n, &mut stream(eta_seed, tags::ROTATION, j as u64));
            let e = column(&eta, 0);
            let lhs = lifted_convolve_sphere(&g, &sigma, &eta).value * f(&e);
            let rhs = g(&e) * lifted_convolve_sphere(&f, &sigma_hat, &eta).value;
            (lhs, rhs)
        })
        .collect();
    let (l, r): (Vec<f64>, Vec<f64>) = terms.into_iter().unzip();
    let d: Vec<f64> = l.iter().zip(&r).map(|(a, b)| a - b).collect();
    let se = Estimate::from_samples(&d).se;
    let (l, r) = (Estimate::from_samples(&l), Estimate::from_samples(&r));
    Ok(Outcome::eq(l.value, r.value, se, cfg.se_tolerance(se)).with_bodies(vec![k.into()]))
}

fn anti_homomorphism(cfg: &SuiteConfig, inst: &Instance) -> Result<Outcome> {
    let n = cfg.n;
    let weighted = |tag: u64| -> Result<RotationSample> {
        let s = RotationSample::haar(
            n,
            ANTI_HOM_ROTATIONS,
            derive_seed(inst.seed, tags::ROTATION, tag),
        );
        RotationSample::new(
            s.rotations().to_vec(),
            signed_weights(ANTI_HOM_ROTATIONS, derive_seed(inst.seed, tag, 0)),
        )
    };
    let (mu, sigma) = (weighted(0)?, weighted(1)?);
    let test = |r: &Mat| r[(0, 1)] + 2.0 * r[(0, 0)] * r[(1, n - 1)] + r[(n - 1, 0)].powi(2);
    let lhs = convolve_measures(&mu, &sigma).hat().integrate(test).value;
    let rhs = convolve_measures(&sigma.hat(), &mu.hat())
        .integrate(test)
        .value;
    Ok(Outcome::eq(lhs, rhs, 0.0, cfg.se_tolerance(0.0)))
}

fn hat_invariant(cfg: &SuiteConfig, inst: &Instance) -> Result<Outcome> {
    let n = cfg.n;
    let i = cfg.degrees()[inst.index];
    let pole = Subspace::pole(n, i);
    let f = |e: &Subspace| {
        let c = principal_cosines(e, &pole);
        c.iter().map(|x| x * x).sum::<f64>() + 3.0 * c.iter().product::<f64>()
    };
    let outcomes = (0..HAT_ROTATIONS).map(|r| {
        let theta = haar_orthogonal(n, &mut stream(inst.seed, tags::ROTATION, r as u64));
        Outcome::eq(
            f(&pole.rotated(&theta.transpose())),
            f(&pole.rotated(&theta)),
            0.0,
            HAT_TOL,
        )
    });
    Outcome::worst(outcomes)
}

fn dirac(cfg: &SuiteConfig, inst: &Instance) -> Result<Outcome> {
    let n = cfg.n;
    let k = body(cfg, inst, 0)?;
    let tol = cfg.se_tolerance(0.0);
    let f = |u: &[f64]| k.support(u) + u[0] * u[n - 1];
    let outcome = match inst.index {
        0 => {
            let grid = fibonacci(n, cfg.nodes.min(DIRAC_MAX_NODES))?;
            let tab = SphericalFunction::from_fn(grid, f);
            let out = convolve_zonal(&tab, &ZonalProfile::dirac());
            Outcome::worst(
                out.values()
                    .iter()
                    .zip(tab.values())
                    .map(|(a, b)| Outcome::eq(*a, *b, 0.0, tol)),
            )?
        }
        1 => {
            let id = RotationSample::identity(n);
            Outcome::worst((0..DIRAC_ROTATIONS).map(|r| {
                let eta = haar_orthogonal(n, &mut stream(inst.seed, tags::ROTATION, r as u64));
                Outcome::eq(
                    lifted_convolve_sphere(&f, &id, &eta).value,
                    f(&column(&eta, 0)),
                    0.0,
                    tol,
                )
            }))?
        }
        j => {
            let i = cfg.degrees()[j - 2];
            let id = RotationSample::identity(n);
            let pole = Subspace::pole(n, i);
            let g = |e: &Subspace| project_volume(&k, e).unwrap_or(f64::NAN);
            Outcome::worst((0..DIRAC_ROTATIONS).map(|r| {
                let eta = haar_orthogonal(n, &mut stream(inst.seed, tags::ROTATION, r as u64));
                Outcome::eq(
                    lifted_convolve_grassmann(&g, i, &id, &eta).value,
                    g(&pole.rotated(&eta)),
                    0.0,
                    tol,
                )
            }))?
        }
    };
    Ok(outcome.with_bodies(vec![k.into()]))
}

/// `sup_u |(g ∗ f_m)(u) - g(u)|` over the grid, with the largest standard
/// error of the convolution values.
fn approximate_identity_gap(
    g: &(dyn Fn(&[f64]) -> f64 + Sync),
    grid: &SphereGrid,
    m: u32,
) -> Result<(f64, f64)> {
    let n = grid.dim();
    let zeta = approximate_identity(m, n)?;
    let rule = ConvolutionRule::for_dim(n);
    let gaps: Vec<(f64, f64)> = (0..grid.len())
        .into_par_iter()
        .map(|k| {
            let u = grid.node(k);
            let e = convolve_field_at(g, u, &zeta, rule);
            ((e.value - g(u)).abs(), e.se)
        })
        .collect();
    Ok(gaps
        .into_iter()
        .fold((0.0f64, 0.0f64), |(a, s), (g, e)| (a.max(g), s.max(e))))
}

fn approximate_identity_convergence(cfg: &SuiteConfig, inst: &Instance) -> Result<Outcome> {
    let grid = fibonacci(cfg.n, cfg.nodes.min(APPROX_MAX_NODES))?;
    let g = |u: &[f64]| u[0] + u[1] * u[2];
    let (coarse, se_c) = approximate_identity_gap(&g, &grid, APPROX_ORDERS[inst.index])?;
    let (fine, se_f) = approximate_identity_gap(&g, &grid, APPROX_ORDERS[inst.index + 1])?;
    Ok(
        Outcome::new(Relation::Lt, fine, coarse, se_c.max(se_f), 0.0).with_note(format!(
            "sup gap for m = {} against m = {}",
            APPROX_ORDERS[inst.index + 1],
            APPROX_ORDERS[inst.index]
        )),
    )
}

fn klain_cosine(cfg: &SuiteConfig, inst: &Instance) -> Result<Outcome> {
    let n = cfg.n;
    let (i, _) = split_degree(cfg, inst.index, KLAIN_MEASURES);
    let base = sample_grassmann(
        n,
        i,
        KLAIN_MEASURE_SIZE,
        derive_seed(inst.seed, tags::GRASSMANN, 0),
    )?;
    let sample = base.with_weights(signed_weights(KLAIN_MEASURE_SIZE, inst.seed))?;
    let phi = RealValuation::from_crofton(CroftonMeasure::new(sample.clone(), false, inst.seed));
    let probe = Polytope::unit_cube(i);
    let one = GrassmannFunction::constant(i, 1.0);
    let mut rng = stream(inst.seed, tags::GRASSMANN, 1);
    let mut outcomes = Vec::with_capacity(KLAIN_TARGETS);
    for _ in 0..KLAIN_TARGETS {
        let target = Subspace::random(n, i, &mut rng);
        let a = klain_function(&phi, &target, &probe)?;
        let b = cosine_transform_at(&one, &sample, &target)?;
        let se = a.combined_se(&b);
        outcomes.push(Outcome::eq(a.value, b.value, se, cfg.se_tolerance(se)));
    }
    Outcome::worst(outcomes)
}

/// `(⟨K f, g⟩, ⟨f, K g⟩)` with `(K f)(F) = Σ_E w_E k(F, E) f(E)` and the
/// pairing taken over the same weighted sample.
pub fn cosine_self_adjointness(
    sample: &GrassmannSample,
    f: &(dyn Fn(&Subspace) -> f64 + Sync),
    g: &(dyn Fn(&Subspace) -> f64 + Sync),
    kernel: &(dyn Fn(&Subspace, &Subspace) -> f64 + Sync),
) -> (f64, f64) {
    let subs = sample.subspaces();
    let w = sample.weights();
    let fv: Vec<f64> = subs.iter().map(f).collect();
    let gv: Vec<f64> = subs.iter().map(g).collect();
    let rows: Vec<(f64, f64)> = (0..subs.len())
        .into_par_iter()
        .map(|a| {
            let kf: Vec<f64> = (0..subs.len())
                .map(|b| w[b] * kernel(&subs[a], &subs[b]) * fv[b])
                .collect();
            let kg: Vec<f64> = (0..subs.len())
                .map(|b| w[b] * kernel(&subs[a], &subs[b]) * gv[b])
                .collect();
            (
                w[a] * gv[a] * pairwise_sum(&kf),
                w[a] * fv[a] * pairwise_sum(&kg),
            )
        })
        .collect();
    let (l, r): (Vec<f64>, Vec<f64>) = rows.into_iter().unzip();
    (pairwise_sum(&l), pairwise_sum(&r))
}

fn squared_projection(e: &Subspace, axis: usize) -> f64 {
    (0..e.dim()).map(|c| e.frame()[(axis, c)].powi(2)).sum()
}

fn cosine_self_adjoint(cfg: &SuiteConfig, inst: &Instance) -> Result<Outcome> {
    let i = cfg.degrees()[inst.index];
    let sample = sample_grassmann(
        cfg.n,
        i,
        cfg.gr_samples.min(SELF_ADJOINT_MAX_SAMPLES),
        inst.seed,
    )?;
    let f = |e: &Subspace| 1.0 + squared_projection(e, 0);
    let g = |e: &Subspace| 0.5 + squared_projection(e, 1);
    let kernel = |a: &Subspace, b: &Subspace| cosine(a, b).unwrap_or(f64::NAN);
    let (lhs, rhs) = cosine_self_adjointness(&sample, &f, &g, &kernel);
    Ok(Outcome::eq(lhs, rhs, 0.0, cfg.se_tolerance(0.0)))
}

fn perturbed_self_adjoint(cfg: &SuiteConfig, inst: &Instance) -> Result<Outcome> {
    let i = cfg.degrees()[0];
    let sample = sample_grassmann(
        cfg.n,
        i,
        cfg.gr_samples.min(SELF_ADJOINT_MAX_SAMPLES),
        inst.seed,
    )?;
    let f = |_: &Subspace| 1.0;
    let g = |e: &Subspace| squared_projection(e, 0);
    let kernel = |a: &Subspace, b: &Subspace| {
        cosine(a, b).unwrap_or(f64::NAN) * (1.0 + 2.0 * squared_projection(b, 0))
    };
    let (lhs, rhs) = cosine_self_adjointness(&sample, &f, &g, &kernel);
    Ok(
        Outcome::eq(lhs, rhs, 0.0, cfg.se_tolerance(0.0)).with_note(format!(
            "Gr_{{{i},{}}} sample of size {}, seed {}",
            cfg.n,
            sample.len(),
            inst.seed
        )),
    )
}

/// The self-adjointness check with a deliberately non-symmetric kernel. It
/// must fail and carry a witness.
pub fn perturbed_cosine_self_adjointness(cfg: &SuiteConfig) -> CheckResult {
    let spec = PERTURBED_SELF_ADJOINT;
    let inst = Instance {
        index: 0,
        seed: instance_seed(cfg, spec.id, 0),
    };
    check_result(Suite::Identities, cfg, &spec, inst, (spec.run)(cfg, &inst))
}

fn radon_lifted(cfg: &SuiteConfig, inst: &Instance) -> Result<Outcome> {
    let n = cfg.n;
    let i = cfg.degrees()[inst.index];
    let k = Arc::new(body(cfg, inst, 0)?);
    let grid = probe_directions(n, RADON_NODES, inst.seed)?;
    let kf = k.clone();
    let f = GrassmannFunction::from_fn(i, move |e| project_volume(&kf, e).unwrap_or(f64::NAN));
    let radon = radon_to_sphere(
        &f,
        i,
        grid.clone(),
        cfg.inner,
        derive_seed(inst.seed, tags::RADON, 0),
    )?;
    let mu = RotationSample::subsphere(n, i, cfg.inner, derive_seed(inst.seed, tags::LIFT, 0))?;
    let g = |e: &Subspace| project_volume(&k, e).unwrap_or(f64::NAN);
    let eta_seed = derive_seed(inst.seed, tags::STABILIZER, 0);
    let outcomes = (0..grid.len()).map(|j| {
        let eta = rotation_mapping_pole(grid.node(j), derive_seed(eta_seed, 0, j as u64));
        let b = lifted_convolve_grassmann(&g, i, &mu, &eta);
        let se = radon.se[j].hypot(b.se);
        Outcome::eq(radon.values()[j], b.value, se, cfg.se_tolerance(se))
    });
    Ok(Outcome::worst(outcomes)?.with_bodies(vec![(*k).clone().into()]))
}

fn pi_i_two_routes(cfg: &SuiteConfig, inst: &Instance) -> Result<Outcome> {
    let n = cfg.n;
    let (i, _) = split_degree(cfg, inst.index, cfg.bodies.min(PI_I_MAX_BODIES));
    let k = Arc::new(body(cfg, inst, 0)?);
    let grid = probe_directions(n, PI_I_NODES, inst.seed)?;
    let kf = k.clone();
    let f = GrassmannFunction::from_fn(i, move |e| project_volume(&kf, e).unwrap_or(f64::NAN))
        .perp_transform(n);
    let c = pi_i_constant(n, i);
    let radon = radon_to_sphere(
        &f,
        n - i,
        grid.clone(),
        cfg.inner,
        derive_seed(inst.seed, tags::RADON, 0),
    )?;
    let outcomes = (0..grid.len())
        .map(|j| {
            let direct = pi_i_support(&k, i, grid.node(j))?;
            let se = c * radon.se[j];
            Ok(Outcome::eq(
                c * radon.values()[j],
                direct,
                se,
                cfg.se_tolerance(se),
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Outcome::worst(outcomes)?.with_bodies(vec![(*k).clone().into()]))
}

fn crofton_pi_i(cfg: &SuiteConfig, inst: &Instance) -> Result<Outcome> {
    let n = cfg.n;
    let (i, j) = split_degree(cfg, inst.index, 1 + CROFTON_BODIES);
    let k = if j == 0 {
        Polytope::unit_cube(n)
    } else {
        body(cfg, inst, 0)?
    };
    let grid = fibonacci(n, CROFTON_NODES.min(cfg.nodes))?;
    let sigma = CroftonMeasure::projection_body(n, i, CROFTON_SUBSPACES, inst.seed)?;
    let h = apply_crofton_minkowski(&sigma, &k, grid.clone())?;
    let outcomes = (0..grid.len())
        .map(|p| {
            let direct = pi_i_support(&k, i, grid.node(p))?;
            let se = h.se[p];
            Ok(Outcome::eq(h.values()[p], direct, se, cfg.se_tolerance(se)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Outcome::worst(outcomes)?.with_bodies(vec![k.into()]))
}

fn projection_two_routes(cfg: &SuiteConfig, inst: &Instance) -> Result<Outcome> {
    let n = cfg.n;
    let mut rng = stream(inst.seed, tags::GRID, 0);
    if inst.index == 0 {
        let k = Polytope::unit_cube(n);
        let outcomes = (0..PROJECTION_CUBE_DIRECTIONS)
            .map(|_| {
                let u = random_unit(n, &mut rng);
                let exact: f64 = u.iter().map(|x| x.abs()).sum();
                Ok(Outcome::eq(
                    projection_support_atoms(&k, u.as_slice())?,
                    exact,
                    0.0,
                    PROJECTION_CUBE_TOL,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        return Ok(Outcome::worst(outcomes)?.with_bodies(vec![k.into()]));
    }
    let k = body(cfg, inst, 0)?;
    let outcomes = (0..PROJECTION_DIRECTIONS)
        .map(|_| {
            let u = random_unit(n, &mut rng);
            let direct = projection_support_direct(&k, u.as_slice())?;
            let atoms = projection_support_atoms(&k, u.as_slice())?;
            Ok(Outcome::eq(
                atoms,
                direct,
                0.0,
                PROJECTION_REL_TOL * direct.abs(),
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Outcome::worst(outcomes)?.with_bodies(vec![k.into()]))
}

fn area_options(inst: &Instance) -> AreaOptions {
    AreaOptions {
        seed: inst.seed,
        ..AreaOptions::default()
    }
}

fn mixed_polynomial_oracle(cfg: &SuiteConfig, inst: &Instance) -> Result<Outcome> {
    let n = cfg.n;
    let k = body(cfg, inst, 0)?;
    let l = body(cfg, inst, 1)?;
    let bodies = vec![k.clone().into(), l.clone().into()];
    let fit = mixed_volume_fit(&k, &l)?;
    if fit.residual > FIT_MAX_RESIDUAL {
        return Ok(Outcome::eq(fit.residual, 0.0, 0.0, FIT_MAX_RESIDUAL)
            .with_bodies(bodies)
            .with_note("mixed-volume polynomial fit residual too large"));
    }
    let lhs = mixed_quermass_pair(&k, &l.into(), n - 1, &area_options(inst))?;
    let rhs = fit.coefficients[1];
    Ok(Outcome::eq(lhs, rhs, 0.0, cfg.mixed_tolerance(rhs, 0.0)).with_bodies(bodies))
}

fn mixed_self_pairing(cfg: &SuiteConfig, inst: &Instance) -> Result<Outcome> {
    let n = cfg.n;
    let (i, _) = split_degree(cfg, inst.index, cfg.bodies);
    let k = body(cfg, inst, 0)?;
    let lhs = mixed_quermass_pair(&k, &k.clone().into(), i, &area_options(inst))?;
    let rhs = quermass_exact(&k).w(n - 1 - i);
    Ok(Outcome::eq(lhs, rhs, 0.0, cfg.mixed_tolerance(rhs, 0.0)).with_bodies(vec![k.into()]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SuiteConfig {
        SuiteConfig {
            bodies: 2,
            pairs: 2,
            nodes: 200,
            gr_samples: 300,
            inner: 64,
            ..SuiteConfig::default()
        }
    }

    #[test]
    fn perturbed_kernel_fails_with_witness() {
        let cfg = small();
        let r = perturbed_cosine_self_adjointness(&cfg);
        assert!(!r.pass, "{r:?}");
        let w = r.witness.expect("failing checks carry a witness");
        assert_eq!(w.check, "cosine.self_adjoint.perturbed");
        let again = super::super::replay(&w).unwrap();
        assert_eq!(again.lhs.to_bits(), r.lhs.to_bits());
    }

    #[test]
    fn symmetric_kernel_is_self_adjoint() {
        let s = sample_grassmann(3, 2, 50, 1).unwrap();
        let f = |e: &Subspace| 1.0 + squared_projection(e, 0);
        let g = |e: &Subspace| squared_projection(e, 2);
        let kernel = |a: &Subspace, b: &Subspace| cosine(a, b).unwrap();
        let (l, r) = cosine_self_adjointness(&s, &f, &g, &kernel);
        assert!((l - r).abs() < 1e-12 * l.abs());
    }

    #[test]
    fn every_identity_check_passes_on_a_small_instance() {
        let cfg = small();
        for spec in identity_checks() {
            let r = super::super::run_check(Suite::Identities, &cfg, &spec, 0);
            assert!(r.pass, "{}: {r:?}", spec.id);
        }
    }
}
