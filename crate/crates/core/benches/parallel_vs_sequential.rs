//! Run once with default features and once with `--no-default-features`; the
//! `mode` in each benchmark id keeps the two builds' results apart. The
//! transient group also compares both paths within a single build.

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use lumpkit::aggregation::{check_cond3, delta_table, uniform_measures};
use lumpkit::casestudies::{polymer_model, polymer_phi2, scaffold_model, PolymerParams, ScaffoldParams};
use lumpkit::markov::{transient, transient_many, Distribution};
use lumpkit::par::is_parallel;
use lumpkit::rules::explore;

fn mode() -> &'static str {
    if is_parallel() {
        "rayon"
    } else {
        "sequential"
    }
}

fn exploration(c: &mut Criterion) {
    let model = polymer_model(&PolymerParams::unit(3));
    c.bench_function(&format!("explore/polymer_3/{}", mode()), |b| {
        b.iter(|| explore(black_box(&model), 100_000).unwrap())
    });
}

fn lumping_checks(c: &mut Criterion) {
    let chain = explore(&polymer_model(&PolymerParams::unit(3)), 100_000).unwrap();
    let (part, _) = chain.partition_by(polymer_phi2);
    let alphas = uniform_measures(&part);
    c.bench_function(&format!("delta_table/polymer_3/{}", mode()), |b| {
        b.iter(|| delta_table(&chain.rates, black_box(&part), &alphas).unwrap())
    });
    c.bench_function(&format!("cond3/polymer_3/{}", mode()), |b| {
        b.iter(|| check_cond3(&chain.rates, black_box(&part)))
    });
}

fn transients(c: &mut Criterion) {
    let chain = explore(&scaffold_model(&ScaffoldParams::unit(3, 4, 3)), 100_000).unwrap();
    let pi0 = Distribution::point(chain.len(), 0);
    let times: Vec<f64> = (1..=8).map(|k| k as f64).collect();
    let mut group = c.benchmark_group("transient_8_times");
    group.bench_function(BenchmarkId::new("transient_many", mode()), |b| {
        b.iter(|| transient_many(&chain.rates, &pi0, black_box(&times), 1e-10).unwrap())
    });
    group.bench_function(BenchmarkId::new("one_at_a_time", mode()), |b| {
        b.iter(|| {
            black_box(&times)
                .iter()
                .map(|&t| transient(&chain.rates, &pi0, t, 1e-10).unwrap())
                .collect::<Vec<_>>()
        })
    });
    group.finish();
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = exploration, lumping_checks, transients
}
criterion_main!(benches);
