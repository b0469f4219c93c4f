use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fwm_core::{
    alpha3_coupled, enhancement_roots, fixed_point_solve, Complex64, IntegrationSettings, Preset,
    SweepRunner,
};

fn steady_states(c: &mut Criterion) {
    let mut group = c.benchmark_group("steady_state");
    for preset in [Preset::Fig1, Preset::Fig3, Preset::Fig4] {
        let params = preset.params();
        let runner = SweepRunner::new(IntegrationSettings::for_params(&params)).with_workers(1);
        group.bench_with_input(BenchmarkId::new("integrate", preset), &params, |b, p| {
            b.iter(|| runner.steady_state(black_box(p)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("fixed_point", preset), &params, |b, p| {
            b.iter(|| fixed_point_solve(black_box(p), None).unwrap())
        });
    }
    group.finish();
}

fn closed_forms(c: &mut Criterion) {
    let single = *Preset::Fig3.params().as_single().unwrap();
    let coupled = *Preset::Fig4.params().as_coupled().unwrap();
    let a1 = Complex64::new(0.07, -0.02);
    let a2 = Complex64::new(0.09, 0.01);
    c.bench_function("enhancement_roots", |b| {
        b.iter(|| enhancement_roots(black_box(&single), black_box(-1.0)).unwrap())
    });
    c.bench_function("alpha3_coupled", |b| {
        b.iter(|| {
            alpha3_coupled(
                black_box(a1),
                black_box(a2),
                -1.0,
                -1.0,
                black_box(&coupled),
            )
        })
    });
}

fn sweep(c: &mut Criterion) {
    let mut spec = Preset::Fig1.sweep();
    spec.n_points = 41;
    let runner = SweepRunner::new(IntegrationSettings::for_params(&spec.base_params));
    let mut group = c.benchmark_group("sweep");
    group.sample_size(10);
    group.bench_function("fig1_41_points", |b| {
        b.iter(|| runner.run_sweep(&spec, Preset::Fig1.baseline()).unwrap())
    });
    group.finish();
}

criterion_group!(benches, steady_states, closed_forms, sweep);
criterion_main!(benches);
