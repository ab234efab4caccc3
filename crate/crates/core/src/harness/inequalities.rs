//! Inequality checks: Brunn–Minkowski and Minkowski type inequalities,
//! mixed-volume symmetry of operators, and radial factors.

use std::sync::Arc;

use rand::Rng as _;
use rayon::prelude::*;

use super::config::SuiteConfig;
use super::result::Relation;
use super::runner::{CheckSpec, Instance, Outcome};
use crate::consts::kappa;
use crate::error::Result;
use crate::geometry::{minkowski_combine, random_polytope, BodyHandle, Polytope};
use crate::grassmann::sample_grassmann;
use crate::linalg::random_unit;
use crate::measures::{
    area_measure, mixed_quermass_pair, mixed_quermass_with, polytopal_ball, quermass_exact,
    quermass_kubota, AreaOptions,
};
use crate::rng::{derive_seed, stream, tags};
use crate::sphere::{build_sphere_grid, GridKind};
use crate::stats::Estimate;
use crate::valuations::{
    intrinsic_volume, pi_i_radial_factor, pi_i_support, projection_body_generators,
    zonotope_volume, VolumeRoute,
};

const HOMOTHETY: f64 = 0.7;
const HOMOTHETIC_PROBES: usize = 10;
const HOMOTHETIC_REL_TOL: f64 = 1e-3;
const MIN_INTERIOR_VOLUME: f64 = 1e-6;
const BALL_NODES: usize = 4000;
const BALL_DIRECTIONS: usize = 50;
const GENERALIZED_PAIRS: usize = 5;
const GENERALIZED_MAX_SAMPLES: usize = 4000;
const EXACT_REL_TOL: f64 = 1e-9;

pub fn inequality_checks() -> Vec<CheckSpec> {
    vec![
        CheckSpec {
            id: "mixed_symmetry.pi_i",
            anchor: "W_{n-1-i}(K, Π_iL) = W_{n-1-i}(L, Π_iK)",
            instances: |cfg| cfg.bodies * cfg.degrees().len(),
            run: mixed_symmetry_pi,
        },
        CheckSpec {
            id: "mixed_symmetry.lambda_i",
            anchor: "W_{n-1-i}(K, Λ_iL) = W_{n-1-i}(L, Λ_iK)",
            instances: |cfg| cfg.bodies * cfg.degrees().len(),
            run: mixed_symmetry_lambda,
        },
        CheckSpec {
            id: "operator.nonempty_interior",
            anchor: "int K ≠ ∅ ⇒ int ΠK ≠ ∅",
            instances: |cfg| cfg.bodies,
            run: nonempty_interior,
        },
        CheckSpec {
            id: "brunn_minkowski.projection_body",
            anchor: "V(Π(K+L))^{1/n(n-1)} ≥ V(ΠK)^{1/n(n-1)} + V(ΠL)^{1/n(n-1)}",
            instances: |cfg| cfg.pairs,
            run: projection_body_bm,
        },
        CheckSpec {
            id: "brunn_minkowski.projection_body.homothetic",
            anchor: "equality in V(Π(K+L))^{1/n(n-1)} ≥ V(ΠK)^{1/n(n-1)} + V(ΠL)^{1/n(n-1)} for L = λK + x",
            instances: |_| HOMOTHETIC_PROBES,
            run: projection_body_bm_homothetic,
        },
        CheckSpec {
            id: "radial_factor.ball",
            anchor: "Π_iB = r(Π_i)B, r(Π_i) = V_i(B^{n-1})",
            instances: |cfg| cfg.degrees().len(),
            run: radial_factor_ball,
        },
        CheckSpec {
            id: "radial_factor.mean_width",
            anchor: "W_{n-1}(Π_iK) = r(Π_i)W_{n-i}(K)",
            instances: |cfg| cfg.bodies * cfg.degrees().len(),
            run: radial_factor_mean_width,
        },
        CheckSpec {
            id: "minkowski.mixed_quermass",
            anchor: "W_i(K, L)^{n-i} ≥ W_i(K)^{n-i-1}W_i(L), compared as (n-i)-th roots",
            instances: |cfg| cfg.pairs * (cfg.n - 1),
            run: minkowski_mixed,
        },
        CheckSpec {
            id: "minkowski.mixed_quermass.homothetic",
            anchor: "equality in W_i(K, L)^{n-i} ≥ W_i(K)^{n-i-1}W_i(L) for L = λK + x",
            instances: |cfg| HOMOTHETIC_PROBES * (cfg.n - 1),
            run: minkowski_homothetic,
        },
        CheckSpec {
            id: "brunn_minkowski.quermass",
            anchor: "W_i(K+L)^{1/(n-i)} ≥ W_i(K)^{1/(n-i)} + W_i(L)^{1/(n-i)}",
            instances: |cfg| cfg.pairs * cfg.n,
            run: quermass_bm,
        },
        CheckSpec {
            id: "brunn_minkowski.generalized",
            anchor: "V_i(K+L, B, …, B)^{1/i} ≥ V_i(K, B, …, B)^{1/i} + V_i(L, B, …, B)^{1/i}",
            instances: |cfg| GENERALIZED_PAIRS * cfg.degrees().len(),
            run: generalized_bm,
        },
    ]
}

fn body(cfg: &SuiteConfig, inst: &Instance, k: u64) -> Result<Polytope> {
    random_polytope(
        cfg.n,
        cfg.vertices,
        derive_seed(inst.seed, tags::POLYTOPE, k),
    )
}

fn pair(cfg: &SuiteConfig, inst: &Instance) -> Result<(Polytope, Polytope)> {
    Ok((body(cfg, inst, 0)?, body(cfg, inst, 1)?))
}

/// `L = λK + x` with `x` uniform in the unit ball.
fn homothetic_pair(cfg: &SuiteConfig, inst: &Instance) -> Result<(Polytope, Polytope)> {
    let k = body(cfg, inst, 0)?;
    let mut rng = stream(inst.seed, tags::POLYTOPE, 2);
    let r: f64 = rng.random::<f64>().powf(1.0 / cfg.n as f64);
    let x: Vec<f64> = random_unit(cfg.n, &mut rng).iter().map(|c| r * c).collect();
    let l = k.scale(HOMOTHETY).translate(&x);
    Ok((k, l))
}

fn minkowski_sum(k: &Polytope, l: &Polytope) -> Result<Polytope> {
    match minkowski_combine(&[k.clone().into(), l.clone().into()], &[1.0, 1.0], None)? {
        BodyHandle::Polytope(p) => Ok(p),
        _ => unreachable!("polytope sums stay polytopes"),
    }
}

fn bodies(k: &Polytope, l: &Polytope) -> Vec<BodyHandle> {
    vec![k.clone().into(), l.clone().into()]
}

fn area_options(inst: &Instance) -> AreaOptions {
    AreaOptions {
        seed: inst.seed,
        ..AreaOptions::default()
    }
}

fn split(index: usize, per: usize) -> (usize, usize) {
    (index / per, index % per)
}

fn mixed_symmetry_pi(cfg: &SuiteConfig, inst: &Instance) -> Result<Outcome> {
    let i = cfg.degrees()[split(inst.index, cfg.bodies).0];
    let (k, l) = pair(cfg, inst)?;
    let opts = area_options(inst);
    let sk = area_measure(&k, i, &opts)?;
    let sl = area_measure(&l, i, &opts)?;
    let lhs = mixed_quermass_with(&sk, |u| pi_i_support(&l, i, u).unwrap_or(f64::NAN));
    let rhs = mixed_quermass_with(&sl, |u| pi_i_support(&k, i, u).unwrap_or(f64::NAN));
    Ok(Outcome::eq(lhs, rhs, 0.0, cfg.mixed_tolerance(rhs, 0.0)).with_bodies(bodies(&k, &l)))
}

fn mixed_symmetry_lambda(cfg: &SuiteConfig, inst: &Instance) -> Result<Outcome> {
    let i = cfg.degrees()[split(inst.index, cfg.bodies).0];
    let (k, l) = pair(cfg, inst)?;
    let opts = area_options(inst);
    let vk = intrinsic_volume(&k, i, VolumeRoute::Exact)?;
    let vl = intrinsic_volume(&l, i, VolumeRoute::Exact)?;
    let lhs = mixed_quermass_with(&area_measure(&k, i, &opts)?, |_| vl);
    let rhs = mixed_quermass_with(&area_measure(&l, i, &opts)?, |_| vk);
    Ok(Outcome::eq(lhs, rhs, 0.0, cfg.mixed_tolerance(rhs, 0.0)).with_bodies(bodies(&k, &l)))
}

fn projection_volume(k: &Polytope) -> Result<f64> {
    Ok(zonotope_volume(&projection_body_generators(k)?, k.dim()))
}

fn nonempty_interior(cfg: &SuiteConfig, inst: &Instance) -> Result<Outcome> {
    let k = body(cfg, inst, 0)?;
    let v = projection_volume(&k)?;
    Ok(Outcome::new(Relation::Gt, v, MIN_INTERIOR_VOLUME, 0.0, 0.0).with_bodies(vec![k.into()]))
}

/// `(V(Π(K+L))^{1/n(n-1)}, V(ΠK)^{1/n(n-1)} + V(ΠL)^{1/n(n-1)})`.
fn projection_bm_sides(k: &Polytope, l: &Polytope) -> Result<(f64, f64)> {
    let n = k.dim();
    let p = 1.0 / (n * (n - 1)) as f64;
    let lhs = projection_volume(&minkowski_sum(k, l)?)?.powf(p);
    let rhs = projection_volume(k)?.powf(p) + projection_volume(l)?.powf(p);
    Ok((lhs, rhs))
}

fn projection_body_bm(cfg: &SuiteConfig, inst: &Instance) -> Result<Outcome> {
    let (k, l) = pair(cfg, inst)?;
    let (lhs, rhs) = projection_bm_sides(&k, &l)?;
    Ok(
        Outcome::new(Relation::Gt, lhs, rhs, 0.0, cfg.se_tolerance(0.0))
            .with_bodies(bodies(&k, &l)),
    )
}

fn projection_body_bm_homothetic(cfg: &SuiteConfig, inst: &Instance) -> Result<Outcome> {
    let (k, l) = homothetic_pair(cfg, inst)?;
    let (lhs, rhs) = projection_bm_sides(&k, &l)?;
    Ok(Outcome::eq(lhs, rhs, 0.0, HOMOTHETIC_REL_TOL * rhs).with_bodies(bodies(&k, &l)))
}

fn radial_factor_ball(cfg: &SuiteConfig, inst: &Instance) -> Result<Outcome> {
    let n = cfg.n;
    let i = cfg.degrees()[inst.index];
    let (ball, delta) = polytopal_ball(n, BALL_NODES)?;
    let mut rng = stream(inst.seed, tags::GRID, 0);
    let values = (0..BALL_DIRECTIONS)
        .map(|_| pi_i_support(&ball, i, random_unit(n, &mut rng).as_slice()))
        .collect::<Result<Vec<f64>>>()?;
    let est = Estimate::from_samples(&values);
    let r = pi_i_radial_factor(n, i);
    Ok(
        Outcome::eq(est.value, r, est.se, cfg.mixed_tolerance(r, est.se)).with_note(format!(
            "polytopal ball with {BALL_NODES} nodes, Hausdorff error {delta:.2e}"
        )),
    )
}

fn radial_factor_mean_width(cfg: &SuiteConfig, inst: &Instance) -> Result<Outcome> {
    let n = cfg.n;
    let i = cfg.degrees()[split(inst.index, cfg.bodies).0];
    let k = body(cfg, inst, 0)?;
    let grid = Arc::new(build_sphere_grid(n, cfg.nodes, GridKind::Fibonacci, 0)?);
    let values = (0..grid.len())
        .into_par_iter()
        .map(|j| pi_i_support(&k, i, grid.node(j)))
        .collect::<Result<Vec<f64>>>()?;
    let est = grid.estimate(&values).scale(kappa(n));
    let rhs = pi_i_radial_factor(n, i) * quermass_exact(&k).w(n - i);
    Ok(
        Outcome::eq(est.value, rhs, est.se, cfg.mixed_tolerance(rhs, est.se))
            .with_bodies(vec![k.into()]),
    )
}

/// `(W_i(K, L), W_i(K)^{(n-i-1)/(n-i)} W_i(L)^{1/(n-i)})`, the `(n-i)`-th
/// root of both sides so that area-measure errors are not amplified.
fn minkowski_sides(k: &Polytope, l: &Polytope, i: usize, opts: &AreaOptions) -> Result<(f64, f64)> {
    let n = k.dim();
    let mixed = mixed_quermass_pair(k, &l.clone().into(), n - 1 - i, opts)?;
    let (wk, wl) = (quermass_exact(k).w(i), quermass_exact(l).w(i));
    let p = 1.0 / (n - i) as f64;
    Ok((mixed, wk.powf(1.0 - p) * wl.powf(p)))
}

/// Area measures of order below `n - 2` integrate over sampled normal-cone
/// regions; lower orders are exact up to arc quadrature.
fn sampled_area_measure(n: usize, order: usize) -> bool {
    order + 2 < n
}

fn minkowski_mixed(cfg: &SuiteConfig, inst: &Instance) -> Result<Outcome> {
    let (i, _) = split(inst.index, cfg.pairs);
    let (k, l) = pair(cfg, inst)?;
    let (lhs, rhs) = minkowski_sides(&k, &l, i, &area_options(inst))?;
    Ok(
        Outcome::new(Relation::Ge, lhs, rhs, 0.0, cfg.mixed_tolerance(rhs, 0.0))
            .with_bodies(bodies(&k, &l)),
    )
}

fn minkowski_homothetic(cfg: &SuiteConfig, inst: &Instance) -> Result<Outcome> {
    let (i, _) = split(inst.index, HOMOTHETIC_PROBES);
    let (k, l) = homothetic_pair(cfg, inst)?;
    let (lhs, rhs) = minkowski_sides(&k, &l, i, &area_options(inst))?;
    let rel = if sampled_area_measure(cfg.n, cfg.n - 1 - i) {
        cfg.rel_tol
    } else {
        HOMOTHETIC_REL_TOL
    };
    Ok(Outcome::eq(lhs, rhs, 0.0, rel * rhs).with_bodies(bodies(&k, &l)))
}

fn quermass_bm(cfg: &SuiteConfig, inst: &Instance) -> Result<Outcome> {
    let n = cfg.n;
    let (i, _) = split(inst.index, cfg.pairs);
    let (k, l) = pair(cfg, inst)?;
    let p = 1.0 / (n - i) as f64;
    let lhs = quermass_exact(&minkowski_sum(&k, &l)?).w(i).powf(p);
    let rhs = quermass_exact(&k).w(i).powf(p) + quermass_exact(&l).w(i).powf(p);
    let tol = cfg.se_tolerance(0.0) + EXACT_REL_TOL * rhs;
    Ok(Outcome::new(Relation::Ge, lhs, rhs, 0.0, tol).with_bodies(bodies(&k, &l)))
}

/// `x^p` with its delta-method standard error.
fn power(e: Estimate, p: f64) -> Estimate {
    Estimate {
        value: e.value.powf(p),
        se: p * e.value.powf(p - 1.0) * e.se,
    }
}

fn generalized_bm(cfg: &SuiteConfig, inst: &Instance) -> Result<Outcome> {
    let n = cfg.n;
    let i = cfg.degrees()[split(inst.index, GENERALIZED_PAIRS).0];
    let (k, l) = pair(cfg, inst)?;
    let sample = sample_grassmann(
        n,
        i,
        cfg.gr_samples.min(GENERALIZED_MAX_SAMPLES),
        derive_seed(inst.seed, tags::KUBOTA, 0),
    )?;
    let p = 1.0 / i as f64;
    let sum = power(quermass_kubota(&minkowski_sum(&k, &l)?, i, &sample)?, p);
    let a = power(quermass_kubota(&k, i, &sample)?, p);
    let b = power(quermass_kubota(&l, i, &sample)?, p);
    let se = (sum.se * sum.se + a.se * a.se + b.se * b.se).sqrt();
    Ok(Outcome::new(
        Relation::Ge,
        sum.value,
        a.value + b.value,
        se,
        cfg.se_tolerance(se),
    )
    .with_bodies(bodies(&k, &l)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{run_check, Suite};

    #[test]
    fn every_inequality_check_passes_on_a_small_instance() {
        let cfg = SuiteConfig {
            bodies: 2,
            pairs: 2,
            nodes: 500,
            gr_samples: 500,
            inner: 64,
            ..SuiteConfig::default()
        };
        for spec in inequality_checks() {
            let r = run_check(Suite::Inequalities, &cfg, &spec, 0);
            assert!(r.pass, "{}: {r:?}", spec.id);
        }
    }

    #[test]
    fn cube_projection_body_volume() {
        // ΠC = [-1, 1]^3 for the unit cube.
        assert!((projection_volume(&Polytope::unit_cube(3)).unwrap() - 8.0).abs() < 1e-12);
    }
}
