use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use rydcoh_bench::ramsey_fringe;
use rydcoh_core::analysis::{fit, FitModel};

fn fits(c: &mut Criterion) {
    let data = ramsey_fringe(61);
    c.bench_function("damped-cosine 61 points", |b| b.iter(|| fit(FitModel::DampedCosine, black_box(&data)).unwrap()));
    c.bench_function("exponential 61 points", |b| b.iter(|| fit(FitModel::Exponential { offset: None }, black_box(&data)).unwrap()));
}

criterion_group!(benches, fits);
criterion_main!(benches);
