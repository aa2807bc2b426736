use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use normprod_bench::instance;
use normprod_core::{
    bessel_k0, bp_recover, irls_recover, pinv, run_np0, run_np1, sbl_recover, svd, BpConfig, IrlsConfig, SblConfig,
    SolverConfig,
};

fn kernels(c: &mut Criterion) {
    let p = instance(30);
    c.bench_function("svd 30x100", |b| b.iter(|| svd(black_box(&p.a)).unwrap()));
    c.bench_function("pinv 30x100", |b| b.iter(|| pinv(black_box(&p.a), None).unwrap()));
    c.bench_function("bessel_k0", |b| b.iter(|| bessel_k0(black_box(1.7)).unwrap()));
}

fn solvers(c: &mut Criterion) {
    let mut group = c.benchmark_group("recover");
    group.sample_size(20);
    for m in [20, 30] {
        let p = instance(m);
        group.bench_with_input(BenchmarkId::new("np0", m), &p, |b, p| {
            b.iter(|| run_np0(&p.a, &p.y, &SolverConfig::default()).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("np1", m), &p, |b, p| {
            b.iter(|| run_np1(&p.a, &p.y, &SolverConfig::default()).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("sbl", m), &p, |b, p| {
            b.iter(|| sbl_recover(&p.a, &p.y, &SblConfig::default(), None).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("irls", m), &p, |b, p| {
            b.iter(|| irls_recover(&p.a, &p.y, &IrlsConfig::default(), None).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("bp", m), &p, |b, p| {
            b.iter(|| bp_recover(&p.a, &p.y, &BpConfig::default(), None).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, kernels, solvers);
criterion_main!(benches);
