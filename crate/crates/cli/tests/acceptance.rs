//! Acceptance criteria, one line per criterion. Runs as a plain binary so
//! the lines are always visible in `cargo test` output.

use std::process::{Command, Stdio};
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;

use mval::consts::kappa;
use mval::geometry::{random_polytope, BodyHandle, Polytope};
use mval::harness::{run_check, run_suite, CheckResult, Suite, SuiteConfig};
use mval::linalg::random_unit;
use mval::measures::{quermass_steiner_fit, quermass_vector_kubota, SteinerFitOptions};
use mval::rng::stream;
use mval::sphere::{build_sphere_grid, interpolation_allowance, is_support_function, GridKind};
use mval::valuations::{
    apply_crofton_minkowski, pi_i_support, projection_support_atoms, projection_support_direct,
    CroftonMeasure,
};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn run_ids(suite: Suite, cfg: &SuiteConfig, ids: &[&str]) -> Vec<CheckResult> {
    let specs: Vec<_> = suite
        .checks()
        .into_iter()
        .filter(|s| ids.contains(&s.id))
        .collect();
    assert_eq!(specs.len(), ids.len(), "unknown check id in {ids:?}");
    let tasks: Vec<(usize, usize)> = specs
        .iter()
        .enumerate()
        .flat_map(|(c, s)| (0..(s.instances)(cfg)).map(move |k| (c, k)))
        .collect();
    tasks
        .par_iter()
        .map(|&(c, k)| run_check(suite, cfg, &specs[c], k))
        .collect()
}

fn summarize(results: &[CheckResult]) -> (bool, String) {
    let failed: Vec<String> = results
        .iter()
        .filter(|r| !r.pass)
        .map(|r| format!("{}#{}", r.id, r.index))
        .collect();
    let worst = results
        .iter()
        .filter(|r| r.tol > 0.0 && r.relation == mval::harness::Relation::Eq)
        .map(|r| r.gap / r.tol)
        .fold(0.0f64, f64::max);
    let detail = if failed.is_empty() {
        format!("{} checks, worst gap/tol {worst:.3}", results.len())
    } else {
        format!(
            "{} of {} failed: {}",
            failed.len(),
            results.len(),
            failed.join(", ")
        )
    };
    (failed.is_empty(), detail)
}

fn projection_two_routes() -> Verdict {
    let cube = Polytope::unit_cube(3);
    let mut rng = stream(1, 0, 0);
    let mut cube_gap = 0.0f64;
    for _ in 0..1000 {
        let u = random_unit(3, &mut rng);
        let exact: f64 = u.iter().map(|x| x.abs()).sum();
        cube_gap =
            cube_gap.max((projection_support_atoms(&cube, u.as_slice()).unwrap() - exact).abs());
    }
    let mut rel_gap = 0.0f64;
    for b in 0..20 {
        let k = random_polytope(3, 12, 100 + b).unwrap();
        for _ in 0..100 {
            let u = random_unit(3, &mut rng);
            let d = projection_support_direct(&k, u.as_slice()).unwrap();
            let a = projection_support_atoms(&k, u.as_slice()).unwrap();
            rel_gap = rel_gap.max((a - d).abs() / d);
        }
    }
    verdict(
        cube_gap <= 1e-9 && rel_gap <= 1e-6,
        format!("cube max gap {cube_gap:.2e} (≤ 1e-9), polytopes max relative gap {rel_gap:.2e} (≤ 1e-6)"),
    )
}

fn kubota_steiner() -> Verdict {
    let opts = SteinerFitOptions::default();
    let cube = quermass_steiner_fit(&Polytope::unit_cube(3).into(), &opts).unwrap();
    let cube_k = quermass_vector_kubota(&Polytope::unit_cube(3), 20_000, 5).unwrap();
    let targets = [1.0, 2.0, std::f64::consts::PI, kappa(3)];
    let mut cube_err = 0.0f64;
    for (j, t) in targets.iter().enumerate() {
        cube_err = cube_err
            .max((cube.w(j) - t).abs() / t)
            .max((cube_k.w(j) - t).abs() / t);
    }
    let rows: Vec<(bool, f64)> = (0..20u64)
        .into_par_iter()
        .map(|b| {
            let k = random_polytope(3, 12, 200 + b).unwrap();
            let fit = quermass_steiner_fit(&BodyHandle::Polytope(k.clone()), &opts).unwrap();
            let kub = quermass_vector_kubota(&k, 20_000, 300 + b).unwrap();
            let mut ok = true;
            let mut worst = 0.0f64;
            for j in [1, 2] {
                let se = kub.se[j].hypot(fit.se[j]);
                let tol = (0.01 * fit.w(j)).max(3.0 * se);
                let gap = (fit.w(j) - kub.w(j)).abs();
                ok &= gap <= tol;
                worst = worst.max(gap / tol);
            }
            (ok, worst)
        })
        .collect();
    let all = rows.iter().all(|r| r.0);
    let worst = rows.iter().map(|r| r.1).fold(0.0f64, f64::max);
    verdict(
        all && cube_err < 0.01,
        format!("cube (W_0..W_3) max relative error {cube_err:.2e} (< 1e-2); 20 polytopes worst gap/tol {worst:.3}"),
    )
}

fn crofton_pi_i() -> Verdict {
    let cfg = SuiteConfig::default();
    let grid = Arc::new(build_sphere_grid(3, 2000, GridKind::Fibonacci, 0).unwrap());
    let mut bodies = vec![Polytope::unit_cube(3)];
    bodies.extend((0..10).map(|b| random_polytope(3, 12, 400 + b).unwrap()));
    let mut node_failures = 0;
    let mut support_failures = 0;
    let mut worst = 0.0f64;
    for i in [1, 2] {
        for (b, k) in bodies.iter().enumerate() {
            let sigma = CroftonMeasure::projection_body(3, i, 64, 500 + b as u64).unwrap();
            let h = apply_crofton_minkowski(&sigma, k, grid.clone()).unwrap();
            for p in 0..grid.len() {
                let direct = pi_i_support(k, i, grid.node(p)).unwrap();
                let tol = cfg.se_tolerance(h.se[p]);
                let gap = (h.values()[p] - direct).abs();
                worst = worst.max(gap / tol);
                node_failures += usize::from(gap > tol);
            }
            let f = &h.function;
            let check =
                is_support_function(f, 1000, interpolation_allowance(f), 600 + b as u64).unwrap();
            support_failures += usize::from(!check.holds);
        }
    }
    verdict(
        node_failures == 0 && support_failures == 0,
        format!(
            "22 bodies × 2000 nodes: {node_failures} node failures (worst gap/tol {worst:.3}), {support_failures} support-function failures"
        ),
    )
}

const IDENTITY_IDS: &[&str] = &[
    "convolution.equivariance",
    "convolution.adjoint",
    "convolution.anti_homomorphism",
    "convolution.hat_invariant",
    "convolution.dirac",
    "convolution.approximate_identity",
];

fn identity_suite(report: &mval::Report) -> Verdict {
    let picked: Vec<CheckResult> = report
        .results
        .iter()
        .filter(|r| IDENTITY_IDS.contains(&r.id.as_str()))
        .cloned()
        .collect();
    let (pass, detail) = summarize(&picked);
    let rest = report.results.iter().filter(|r| !r.pass).count();
    verdict(
        pass && rest == 0,
        format!(
            "{detail}; full suite {}/{} passed",
            report.summary.passed, report.summary.total
        ),
    )
}

fn klain(report: &mval::Report) -> Verdict {
    let picked: Vec<CheckResult> = report
        .results
        .iter()
        .filter(|r| r.id == "klain.cosine_transform")
        .cloned()
        .collect();
    let (pass, detail) = summarize(&picked);
    verdict(
        pass,
        format!("5 signed measures × 50 subspaces per degree: {detail}"),
    )
}

fn mixed_symmetry(cfg: &SuiteConfig) -> Verdict {
    let (pass, detail) = summarize(&run_ids(
        Suite::Inequalities,
        cfg,
        &["mixed_symmetry.pi_i", "mixed_symmetry.lambda_i"],
    ));
    verdict(pass, format!("Π_1, Π_2, Λ_1, Λ_2 on 20 pairs: {detail}"))
}

fn projection_bm(cfg: &SuiteConfig) -> Verdict {
    let results = run_ids(
        Suite::Inequalities,
        cfg,
        &[
            "brunn_minkowski.projection_body",
            "brunn_minkowski.projection_body.homothetic",
            "operator.nonempty_interior",
        ],
    );
    let min_gap = results
        .iter()
        .filter(|r| r.id == "brunn_minkowski.projection_body")
        .map(|r| r.gap)
        .fold(f64::INFINITY, f64::min);
    let homothetic = results
        .iter()
        .filter(|r| r.id.ends_with("homothetic"))
        .map(|r| r.gap / r.rhs)
        .fold(0.0f64, f64::max);
    let (pass, detail) = summarize(&results);
    verdict(pass, format!("{detail}; smallest random-pair gap {min_gap:.3e}, largest homothetic relative gap {homothetic:.1e}"))
}

fn radial_factor(cfg: &SuiteConfig) -> Verdict {
    let cfg = SuiteConfig {
        degrees: vec![2],
        ..cfg.clone()
    };
    let results = run_ids(
        Suite::Inequalities,
        &cfg,
        &["radial_factor.ball", "radial_factor.mean_width"],
    );
    let r = results
        .iter()
        .find(|r| r.id == "radial_factor.ball")
        .map(|r| r.lhs)
        .unwrap_or(f64::NAN);
    let (pass, detail) = summarize(&results);
    verdict(pass, format!("r(Π_2) ≈ {r:.5} vs π; {detail}"))
}

fn determinism() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, threads: Option<&str>| -> Vec<u8> {
        let out = dir.path().join(name);
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_mval"));
        if let Some(t) = threads {
            cmd.args(["--threads", t]);
        }
        let status = cmd
            .args(["verify", "identities", "--seed", "7", "--out"])
            .arg(&out)
            .stderr(Stdio::null())
            .status()
            .unwrap();
        assert!(status.code().is_some());
        std::fs::read(out).unwrap()
    };
    let a = run("a.json", None);
    let b = run("b.json", None);
    let serial = run("serial.json", Some("1"));
    let parallel = run("parallel.json", Some("4"));
    let same = a == b && a == serial && a == parallel;
    verdict(
        same,
        format!(
            "{} byte reports: rerun {}, 1 thread {}, 4 threads {}",
            a.len(),
            a == b,
            a == serial,
            a == parallel
        ),
    )
}

fn main() {
    let cfg = SuiteConfig::default();
    let mut lines = Vec::new();
    let mut timed = |n: usize, name: &str, f: &dyn Fn() -> Verdict| {
        let start = Instant::now();
        let v = f();
        let secs = start.elapsed().as_secs_f64();
        let line = format!(
            "criterion {n} [{name}]: {} ({secs:.1} s) {}",
            if v.pass { "PASS" } else { "FAIL" },
            v.detail
        );
        println!("{line}");
        lines.push(v.pass);
    };
    timed(1, "projection body two routes", &projection_two_routes);
    timed(2, "Kubota vs Steiner fit", &kubota_steiner);
    timed(3, "Crofton realization of Π_i", &crofton_pi_i);
    let start = Instant::now();
    let report = run_suite(Suite::Identities, &cfg).unwrap();
    println!(
        "identity suite ran in {:.1} s",
        start.elapsed().as_secs_f64()
    );
    timed(4, "convolution identity suite", &|| identity_suite(&report));
    timed(5, "Klain function = cosine transform", &|| klain(&report));
    timed(6, "mixed-volume symmetry", &|| mixed_symmetry(&cfg));
    timed(7, "projection body Brunn–Minkowski", &|| {
        projection_bm(&cfg)
    });
    timed(8, "radial factor", &|| radial_factor(&cfg));
    timed(9, "determinism", &determinism);
    let failed = lines.iter().filter(|p| !**p).count();
    println!(
        "acceptance: {} of {} criteria passed",
        lines.len() - failed,
        lines.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
