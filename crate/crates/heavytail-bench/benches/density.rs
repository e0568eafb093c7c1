use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use heavytail::{
    gv_abs, gv_bm, integrate_adaptive, normalization_check, tail_functional, QuadratureConfig,
    Weights,
};
use heavytail_bench::{abs_model, bm_model};

fn bench_quadrature(c: &mut Criterion) {
    let cfg = QuadratureConfig::default();

    c.bench_function("integrate_adaptive cauchy kernel", |b| {
        b.iter(|| {
            integrate_adaptive(|x| 1.0 / (1.0 + x * x), black_box(0.0), f64::INFINITY, &cfg)
                .unwrap()
        })
    });

    let w = Weights::pair(0.3).unwrap();
    c.bench_function("gv_abs at v=0.5", |b| {
        b.iter(|| gv_abs(black_box(0.5), 0.5, &w, &cfg).unwrap())
    });
    c.bench_function("gv_bm at v=0.5", |b| {
        b.iter(|| gv_bm(black_box(0.5), 0.5, &w, &cfg).unwrap())
    });

    let abs = abs_model();
    c.bench_function("tail_functional at v=1e4", |b| {
        b.iter(|| tail_functional(&abs, black_box(1e4), &cfg).unwrap())
    });

    let bm = bm_model();
    c.bench_function("normalization_check bm", |b| {
        b.iter(|| normalization_check(&bm, &cfg).unwrap())
    });
}

criterion_group!(benches, bench_quadrature);
criterion_main!(benches);
