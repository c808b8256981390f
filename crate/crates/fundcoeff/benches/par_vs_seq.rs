use std::collections::BTreeMap;
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fundcoeff::arith::Sieve;
use fundcoeff::classgroup::class_group_with;
use fundcoeff::lfun::{self, central_values};
use fundcoeff::par::Mode;
use fundcoeff::resonance::FamilyD;
use fundcoeff::satake::{self, SatakeGSp4};

const MODES: [(&str, Mode); 2] = [("seq", Mode::Sequential), ("par", Mode::Parallel)];

fn bench_central_values(c: &mut Criterion) {
    let g = lfun::g18().unwrap();
    let ds = FamilyD::new(1, 1, g.kappa()).unwrap().members(1000);
    let mut group = c.benchmark_group("central_values");
    group.sample_size(10);
    for (name, mode) in MODES {
        group.bench_with_input(BenchmarkId::new(name, ds.len()), &ds, |b, ds| {
            b.iter(|| black_box(central_values(&g, ds, mode)))
        });
    }
    group.finish();
}

fn bench_class_group(c: &mut Criterion) {
    let mut group = c.benchmark_group("class_group");
    group.sample_size(10);
    for d in [-100_003i64, -1_000_003] {
        for (name, mode) in MODES {
            group.bench_with_input(BenchmarkId::new(name, d), &d, |b, &d| {
                b.iter(|| black_box(class_group_with(d, mode).unwrap()))
            });
        }
    }
    group.finish();
}

fn bench_p_lambda(c: &mut Criterion) {
    let g = class_group_with(-1_000_003, Mode::Sequential).unwrap();
    let pi = SatakeGSp4::fuzz(1000, 1);
    let mut group = c.benchmark_group("p_lambda_all");
    group.sample_size(10);
    for (name, mode) in MODES {
        group.bench_function(BenchmarkId::new(name, g.h()), |b| {
            b.iter(|| black_box(satake::p_lambda_all(&pi, &g, 1000.0, 1, mode).unwrap()))
        });
    }
    group.finish();
}

fn bench_random_model(c: &mut Criterion) {
    let b: BTreeMap<u64, f64> = Sieve::new(1000).primes_up_to(1000).map(|p| (p, 1.0)).collect();
    let mut group = c.benchmark_group("random_model_mc");
    group.sample_size(10);
    for (name, mode) in MODES {
        group.bench_function(BenchmarkId::new(name, 100_000), |bch| {
            bch.iter(|| black_box(satake::random_model_mc(-163, &b, 1000, 100_000, 1, mode).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, bench_central_values, bench_class_group, bench_p_lambda, bench_random_model);
criterion_main!(benches);
