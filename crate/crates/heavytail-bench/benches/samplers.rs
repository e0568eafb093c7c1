use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use heavytail::{
    cauchy_cdf, ks_one_sample, sample_abs_ratio, sample_ratio_pm, sample_stopped_bm_mixture,
    sample_stopped_bm_path, theta_to_covariance, CauchyScale, EmpiricalSample, ThetaCovariance,
    Weights,
};

const DRAWS: usize = 100_000;

fn bench_samplers(c: &mut Criterion) {
    let sigma = theta_to_covariance(0.5).unwrap();
    let theta = ThetaCovariance::new(0.5).unwrap();
    let w = Weights::pair(0.3).unwrap();

    let mut group = c.benchmark_group("samplers");
    group.throughput(Throughput::Elements(DRAWS as u64));
    group.bench_function(BenchmarkId::new("ratio_pm", DRAWS), |b| {
        b.iter(|| sample_ratio_pm(&sigma, &w, DRAWS, black_box(1)).unwrap())
    });
    group.bench_function(BenchmarkId::new("abs_ratio", DRAWS), |b| {
        b.iter(|| sample_abs_ratio(&sigma, &w, DRAWS, black_box(1)).unwrap())
    });
    group.bench_function(BenchmarkId::new("stopped_bm_path", DRAWS), |b| {
        b.iter(|| sample_stopped_bm_path(&sigma, &w, DRAWS, black_box(1)).unwrap())
    });
    group.bench_function(BenchmarkId::new("stopped_bm_mixture", DRAWS), |b| {
        b.iter(|| sample_stopped_bm_mixture(&theta, &w, DRAWS, black_box(1)).unwrap())
    });
    group.finish();

    let batch = sample_ratio_pm(&sigma, &w, DRAWS, 2).unwrap();
    c.bench_function("ks_one_sample 1e5", |b| {
        b.iter(|| {
            let sample = EmpiricalSample::new(batch.values.clone()).unwrap();
            ks_one_sample(&sample, |x| cauchy_cdf(x, CauchyScale::STANDARD), 0.01).unwrap()
        })
    });
}

criterion_group!(benches, bench_samplers);
criterion_main!(benches);
