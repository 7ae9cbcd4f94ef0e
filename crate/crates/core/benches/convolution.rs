use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_bigint::BigInt;

use rankin_cohen::adjoint::{adjoint_coefficients, AdjointCase, CaseId, LOptions};
use rankin_cohen::conv::{convolve_with, Strategy};
use rankin_cohen::forms::catalog_get;
use rankin_cohen::qseries::series_mul;
use rankin_cohen::TwiceWeight;

fn pools() -> [(&'static str, rayon::ThreadPool); 2] {
    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let all = rayon::ThreadPoolBuilder::new().build().unwrap();
    [("sequential", single), ("parallel", all)]
}

fn adjoint(c: &mut Criterion) {
    let terms = 5000;
    let theta = catalog_get("theta", terms + 12).unwrap();
    let f = series_mul(&theta, &catalog_get("delta_4_6", terms + 12).unwrap());
    let case = AdjointCase::new(CaseId::IntFromHalfG, TwiceWeight::from_int(6), TwiceWeight::from_twice(1), 0).unwrap();
    let mut group = c.benchmark_group("adjoint_theta_delta_4_6");
    group.sample_size(10);
    for (name, pool) in pools() {
        group.bench_function(name, |b| {
            b.iter(|| pool.install(|| adjoint_coefficients(&f, &theta, &case, 10, terms, LOptions::default()).unwrap()))
        });
    }
    group.finish();
}

fn series_product(c: &mut Criterion) {
    let len = 20_000;
    let e4 = catalog_get("E4", len).unwrap();
    let delta = catalog_get("delta", len).unwrap();
    let mut group = c.benchmark_group("e4_times_delta");
    group.sample_size(10);
    for (name, pool) in pools() {
        group.bench_function(name, |b| b.iter(|| pool.install(|| series_mul(&e4, &delta))));
    }
    group.finish();
}

fn strategies(c: &mut Criterion) {
    let mut group = c.benchmark_group("convolve_strategies");
    for len in [64usize, 512, 4096] {
        let a: Vec<BigInt> = (0..len as i64).map(|i| BigInt::from((i * 7919) % 100_003 - 50_000)).collect();
        let b: Vec<BigInt> = (0..len as i64).map(|i| BigInt::from((i * 104_729) % 65_537 - 30_000)).collect();
        for s in [Strategy::Schoolbook, Strategy::MultiModular, Strategy::Auto] {
            group.bench_with_input(BenchmarkId::new(format!("{s:?}"), len), &len, |bench, &len| {
                bench.iter(|| convolve_with(&a, &b, len, s))
            });
        }
    }
    group.finish();
}

criterion_group!(benches, adjoint, series_product, strategies);
criterion_main!(benches);
