use std::sync::Arc;

use mval::geometry::{random_polytope, Ball, BodyHandle, Polytope};
use mval::grassmann::sample_grassmann;
use mval::harness::{result, run_suite, Suite, SuiteConfig};
use mval::measures::{area_measure, AreaOptions};
use mval::sphere::{build_sphere_grid, GridKind, SphericalFunction};
use mval::{AtomicMeasure, GrassmannSample, SphereGrid, SupportBody};

fn through_file(value: &serde_json::Value) -> serde_json::Value {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("v.json");
    std::fs::write(&path, serde_json::to_string_pretty(value).unwrap()).unwrap();
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn bodies_round_trip() {
    let grid = Arc::new(build_sphere_grid(3, 200, GridKind::Fibonacci, 0).unwrap());
    let k = random_polytope(3, 12, 9).unwrap();
    let bodies: Vec<BodyHandle> = vec![
        k.clone().into(),
        Polytope::unit_cube(4).into(),
        Ball::new(vec![1.0, 2.0, 3.0], 0.5).unwrap().into(),
        SupportBody::new(BodyHandle::from(k).tabulate(grid)).into(),
    ];
    for b in bodies {
        let back = BodyHandle::from_json(&through_file(&b.to_json())).unwrap();
        assert_eq!(back.to_json(), b.to_json());
        let u = [0.6, 0.0, 0.8];
        if b.dim() == 3 {
            assert_eq!(back.support(&u).to_bits(), b.support(&u).to_bits());
        }
    }
}

#[test]
fn grids_samples_and_measures_round_trip() {
    let grid = build_sphere_grid(3, 150, GridKind::Fibonacci, 1).unwrap();
    assert_eq!(
        SphereGrid::from_json(&through_file(&grid.to_json())).unwrap(),
        grid
    );

    let sample = sample_grassmann(4, 2, 30, 2).unwrap();
    let back = GrassmannSample::from_json(&through_file(&sample.to_json())).unwrap();
    assert_eq!(back.weights(), sample.weights());
    let flat = |s: &GrassmannSample| -> Vec<f64> {
        let v = s.to_json();
        v["frames"]
            .as_array()
            .unwrap()
            .iter()
            .flat_map(|f| f.as_array().unwrap().clone())
            .flat_map(|c| c.as_array().unwrap().clone())
            .map(|x| x.as_f64().unwrap())
            .collect()
    };
    assert!(flat(&back)
        .iter()
        .zip(flat(&sample))
        .all(|(a, b)| (a - b).abs() < 1e-12));

    let s = area_measure(
        &random_polytope(3, 10, 3).unwrap(),
        1,
        &AreaOptions::default(),
    )
    .unwrap();
    assert_eq!(
        AtomicMeasure::from_json(&through_file(&s.to_json())).unwrap(),
        s
    );

    let grid = Arc::new(grid);
    let f = SphericalFunction::constant(grid.clone(), 2.5);
    let back = SphericalFunction::from_json(&through_file(&f.to_json()), grid).unwrap();
    assert_eq!(back.values(), f.values());
}

#[test]
fn report_round_trips_and_reruns_identically() {
    let cfg = SuiteConfig {
        bodies: 1,
        pairs: 1,
        nodes: 200,
        gr_samples: 200,
        inner: 32,
        ..SuiteConfig::default()
    };
    let a = run_suite(Suite::Identities, &cfg).unwrap();
    let b = run_suite(Suite::Identities, &cfg).unwrap();
    let text = result::to_json(&a);
    assert_eq!(text, result::to_json(&b));
    assert_eq!(result::to_json(&result::from_json(&text).unwrap()), text);
    assert!(a.all_passed());
}
