use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use gclab_bench::{ar1_path, slow_chain};
use gclab_core::empirical::{ks_sup_deviation, run_gc_diagnostic};
use gclab_core::entropy::{shatters, ClosedIntervals};
use gclab_core::generators::{normal_orthant_covariance, Marginal, StationaryModel};

fn ks(c: &mut Criterion) {
    let normal = Marginal::standard_normal();
    let mut group = c.benchmark_group("ks_sup_deviation");
    for n in [1 << 10, 1 << 14] {
        let path = ar1_path(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &path, |b, p| {
            b.iter(|| ks_sup_deviation(black_box(p), &normal).unwrap())
        });
    }
    group.finish();
}

fn sampling(c: &mut Criterion) {
    let model = StationaryModel::gaussian_ar1(0.6).unwrap();
    c.bench_function("ar1_sample_16k", |b| b.iter(|| model.sample(black_box(1 << 14), 3).unwrap()));
}

fn phi_profile(c: &mut Criterion) {
    let chain = slow_chain();
    c.bench_function("phi_profile_6_states_400", |b| b.iter(|| chain.phi_mixing_profile(black_box(400))));
}

fn shattering(c: &mut Criterion) {
    let pts: Vec<f64> = (0..12).map(|k| k as f64).collect();
    c.bench_function("shatters_intervals_12", |b| b.iter(|| shatters(black_box(&pts), &ClosedIntervals).unwrap()));
}

fn quadrature(c: &mut Criterion) {
    c.bench_function("orthant_covariance", |b| {
        b.iter(|| normal_orthant_covariance(black_box(0.3), black_box(-0.7), black_box(0.6)))
    });
}

fn diagnostic(c: &mut Criterion) {
    let model = StationaryModel::iid(Marginal::standard_uniform());
    let grid = [64, 256, 1024];
    c.bench_function("gc_diagnostic_iid_20reps", |b| {
        b.iter(|| run_gc_diagnostic(&model, black_box(&grid), 20, 5).unwrap())
    });
}

criterion_group!(benches, ks, sampling, phi_profile, shattering, quadrature, diagnostic);
criterion_main!(benches);
