use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, Criterion};

use mval::geometry::{hull_volume, random_polytope};
use mval::grassmann::{cosine_transform_at, sample_grassmann};
use mval::measures::{area_measure, quermass_exact, AreaOptions};
use mval::sphere::{build_sphere_grid, GridKind};
use mval::valuations::{
    apply_crofton_minkowski, pi_i_support, projection_body_generators, zonotope_volume,
    CroftonMeasure,
};
use mval::GrassmannFunction;

fn geometry(c: &mut Criterion) {
    let k = random_polytope(3, 40, 1).unwrap();
    let pts: Vec<f64> = k.vertices().flatten().copied().collect();
    c.bench_function("hull_volume/40 points", |b| {
        b.iter(|| hull_volume(black_box(&pts), 3))
    });
    let k = random_polytope(3, 12, 2).unwrap();
    c.bench_function("quermass_exact/12 vertices", |b| {
        b.iter(|| quermass_exact(black_box(&k)))
    });
    let gens = projection_body_generators(&k).unwrap();
    c.bench_function("zonotope_volume/projection body", |b| {
        b.iter(|| zonotope_volume(black_box(&gens), 3))
    });
}

fn measures(c: &mut Criterion) {
    let k = random_polytope(3, 12, 3).unwrap();
    let opts = AreaOptions::default();
    c.bench_function("area_measure/S_1", |b| {
        b.iter(|| area_measure(black_box(&k), 1, &opts).unwrap())
    });
}

fn valuations(c: &mut Criterion) {
    let k = random_polytope(3, 12, 4).unwrap();
    let grid = Arc::new(build_sphere_grid(3, 500, GridKind::Fibonacci, 0).unwrap());
    c.bench_function("pi_i_support/i=1, 500 nodes", |b| {
        b.iter(|| {
            (0..grid.len())
                .map(|j| pi_i_support(&k, 1, grid.node(j)).unwrap())
                .sum::<f64>()
        })
    });
    let sigma = CroftonMeasure::projection_body(3, 1, 64, 5).unwrap();
    c.bench_function("apply_crofton_minkowski/i=1, 500 nodes", |b| {
        b.iter(|| apply_crofton_minkowski(&sigma, &k, grid.clone()).unwrap())
    });
    let sample = sample_grassmann(3, 2, 2000, 6).unwrap();
    let target = sample_grassmann(3, 2, 1, 7).unwrap().subspaces()[0].clone();
    let f = GrassmannFunction::constant(2, 1.0);
    c.bench_function("cosine_transform_at/2000 subspaces", |b| {
        b.iter(|| cosine_transform_at(&f, black_box(&sample), &target).unwrap())
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = geometry, measures, valuations
}
criterion_main!(benches);
