use criterion::{criterion_group, criterion_main, Criterion};
use qbp_bench::{params, points};
use qbp_core::{check_inequality, Inequality, InequalityId, PartialSpec, VerifyOptions};
use std::hint::black_box;

fn bench_check(c: &mut Criterion) {
    let pts = points();
    let options = VerifyOptions::default();
    let p = params(0.1, 1.0);
    let id = InequalityId::literal(Inequality::T1Ratio);
    let m = PartialSpec::new(3).unwrap();
    c.bench_function("check_inequality/T1_ratio/default_grid", |b| {
        b.iter(|| check_inequality(id, &p, m, black_box(&pts), &options).unwrap())
    });
}

criterion_group!(benches, bench_check);
criterion_main!(benches);
