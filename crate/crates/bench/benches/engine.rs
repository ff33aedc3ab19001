use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use rydcoh_bench::hermitian;
use rydcoh_core::engine::{expm, lindblad_propagator, unitary, CollapseOperator};
use rydcoh_core::experiments::{preset, run_experiment, CzSchedule};

fn propagators(c: &mut Criterion) {
    let h9 = hermitian(9, 1e6);
    c.bench_function("unitary 9x9", |b| b.iter(|| unitary(black_box(&h9), 1e-6)));

    let h5 = hermitian(5, 1e6);
    let collapse = vec![
        CollapseOperator::decay(5, 1, 0, 3.8e7, "intermediate").unwrap(),
        CollapseOperator::decay(5, 2, 0, 4.8e3, "rydberg").unwrap(),
        CollapseOperator::dephasing(5, 2, 1e4, "laser").unwrap(),
    ];
    c.bench_function("lindblad propagator 5 levels", |b| b.iter(|| lindblad_propagator(black_box(&h5), &collapse, 1e-6)));

    let a = hermitian(16, 1.0).map(|z| z * rydcoh_core::engine::C64::new(0.0, -1.0));
    c.bench_function("expm 16x16", |b| b.iter(|| expm(black_box(&a))));

    let tau = std::f64::consts::TAU;
    let gate = CzSchedule::new(tau * 1e9, tau * 1e6).unwrap();
    c.bench_function("cz propagator", |b| b.iter(|| gate.propagator(black_box((tau * 1e6, tau * 1e6)), (0.0, 0.0)).unwrap()));
}

fn ensembles(c: &mut Criterion) {
    let mut group = c.benchmark_group("ensemble");
    group.sample_size(10);
    let ramsey = preset("fig4a").unwrap();
    group.bench_function("ramsey-gr 50 shots", |b| b.iter(|| run_experiment(&ramsey, 50, 1).unwrap()));
    let cz = preset("fig6").unwrap();
    group.bench_function("cz-scan", |b| b.iter(|| run_experiment(&cz, 1, 7).unwrap()));
    group.finish();
}

criterion_group!(benches, propagators, ensembles);
criterion_main!(benches);
