use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use freevis_core::audit::default_grid;
use freevis_core::morphism::is_primitive;
use freevis_core::{
    frontier, qie_frontier, AuditConfig, Basis, Endomorphism, GeneratingSet, VisualMetricSpec,
};

fn genset_search(c: &mut Criterion) {
    let b = Basis::standard(2);
    let s = GeneratingSet::parse_members(&b, "a, b, a^2 b, a^3 b").unwrap();
    let w = b.parse_word("a^-2 b^-1 a^-3 b^-1 a b").unwrap();
    let mut group = c.benchmark_group("genset_length");
    group.sample_size(10);
    for n in [1, 2, 3] {
        let target = w.pow(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &target, |bench, t| {
            bench.iter(|| s.length(black_box(t), 1_000_000_000).unwrap())
        });
    }
    group.finish();
}

fn frontiers(c: &mut Criterion) {
    let b = Basis::standard(2);
    let spec = VisualMetricSpec::standard(&b);
    let cfg = AuditConfig::default();
    let mu = Endomorphism::mu(
        &b,
        &b.parse_word("a b").unwrap(),
        &b.parse_word("b").unwrap(),
    )
    .unwrap();
    let grid = default_grid();
    let mut group = c.benchmark_group("frontier");
    group.sample_size(10);
    for radius in [6usize, 8, 10] {
        let radii: Vec<usize> = (1..=radius).collect();
        group.bench_with_input(
            BenchmarkId::new("gromov_tree", radius),
            &radii,
            |bench, r| bench.iter(|| frontier(&mu, &grid, r, &spec, &cfg).unwrap()),
        );
    }
    for radius in [4usize, 6] {
        let radii: Vec<usize> = (1..=radius).collect();
        group.bench_with_input(
            BenchmarkId::new("word_metric_scan", radius),
            &radii,
            |bench, r| bench.iter(|| qie_frontier(&mu, &grid, r, &cfg).unwrap()),
        );
    }
    group.finish();
}

fn whitehead(c: &mut Criterion) {
    let b = Basis::standard(2);
    let words = freevis_core::ball(2, 7);
    c.bench_function("is_primitive_ball7", |bench| {
        bench.iter(|| words.iter().filter(|u| is_primitive(u, b.rank())).count())
    });
}

criterion_group!(benches, genset_search, frontiers, whitehead);
criterion_main!(benches);
