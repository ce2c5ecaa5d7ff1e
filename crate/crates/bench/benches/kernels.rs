use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use curvagraph::curvature::max_negative_vertex_curvature;
use curvagraph::generate::{pq_ball, regular_tree};
use curvagraph::isoperimetry::{interior_ball, DEFAULT_MAX_SETS};
use curvagraph::*;

fn generation(c: &mut Criterion) {
    let mut g = c.benchmark_group("pq_ball");
    for (p, q) in [(7, 3), (4, 5), (3, 7)] {
        g.bench_with_input(BenchmarkId::from_parameter(format!("{{{p},{q}}} r6")), &(p, q), |b, &(p, q)| {
            b.iter(|| pq_ball(p, q, 6).unwrap())
        });
    }
    g.finish();
}

fn curvature(c: &mut Criterion) {
    let map = pq_ball(7, 3, 7).unwrap();
    c.bench_function("trace_faces {7,3} r7", |b| b.iter(|| trace_faces(black_box(&map))));
    let faces = trace_faces(&map);
    c.bench_function("curvature report {7,3} r7", |b| b.iter(|| CurvatureReport::compute(black_box(&map), &faces)));
    c.bench_function("degree vectors n<=6 l<=50", |b| b.iter(|| max_negative_vertex_curvature(6, 50)));
}

fn metric(c: &mut Criterion) {
    let map = pq_ball(7, 3, 7).unwrap();
    c.bench_function("admissibility {7,3} h6", |b| b.iter(|| check_admissibility(&map, 0, 6).unwrap()));
    c.bench_function("bigons {7,3} h4", |b| b.iter(|| minimal_bigons(&map, 0, 4).unwrap()));
}

fn cheeger(c: &mut Criterion) {
    let tree = regular_tree(3, 7).unwrap();
    let region = interior_ball(&tree, 0, 4);
    c.bench_function("cheeger brute force tree B4 k8", |b| {
        b.iter(|| cheeger_bruteforce(&tree, &region, 8, DEFAULT_MAX_SETS).unwrap())
    });
}

fn spectral(c: &mut Criterion) {
    let tree = regular_tree(3, 9).unwrap();
    let radii: Vec<usize> = (1..=9).collect();
    c.bench_function("dirichlet bottoms tree r1..9", |b| {
        b.iter(|| verify_spectral_bounds(&tree, 0, &radii, 1e-8).unwrap())
    });
    let map = pq_ball(7, 3, 7).unwrap();
    let a = NearestNeighborOperator::laplacian(&map);
    c.bench_function("polar decomposition {7,3} h6", |b| b.iter(|| polar_decompose(&map, &a, 0, 6).unwrap()));
    c.bench_function("eigensearch {7,3} h6", |b| b.iter(|| finitely_supported_eigenfunctions(&map, &a, 0, 6).unwrap()));
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = generation, curvature, metric, cheeger, spectral
}
criterion_main!(benches);
