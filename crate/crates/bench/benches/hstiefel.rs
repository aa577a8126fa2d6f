use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use hstiefel::random::{gaussian_matrix, rng_from_seed};
use hstiefel::{
    closed_form_trajectory, hessian_spectrum, notable_point, numerical_flow, relative_svd, svd,
};
use hstiefel_bench::sample_points;

fn bench_svd(c: &mut Criterion) {
    let mut group = c.benchmark_group("svd");
    for n in [2usize, 4, 6] {
        let a = gaussian_matrix(&mut rng_from_seed(n as u64), n, n);
        group.bench_with_input(BenchmarkId::new("square", n), &a, |b, a| {
            b.iter(|| svd(black_box(a)).unwrap())
        });
    }
    for (n, k) in [(4usize, 2usize), (6, 3)] {
        let x = sample_points(n, k, 1).remove(0);
        group.bench_with_input(BenchmarkId::new("relative", format!("{n}x{k}")), &x, |b, x| {
            b.iter(|| relative_svd(black_box(x)).unwrap())
        });
    }
    group.finish();
}

fn bench_spectrum(c: &mut Criterion) {
    let mut group = c.benchmark_group("hessian_spectrum");
    for (n, k, q) in [(3usize, 1usize, 1usize), (4, 2, 1), (6, 3, 2)] {
        let x = notable_point(n, k, q).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(format!("{n},{k},{q}")), &x, |b, x| {
            b.iter(|| hessian_spectrum(black_box(x)).unwrap())
        });
    }
    group.finish();
}

fn bench_flow(c: &mut Criterion) {
    let mut group = c.benchmark_group("flow_4x2_1000_steps");
    let x = sample_points(4, 2, 1).remove(0);
    group.bench_function("closed_form", |b| {
        b.iter(|| closed_form_trajectory(black_box(&x), 0.0, 1.0, 1000).unwrap())
    });
    group.bench_function("rk4", |b| {
        b.iter(|| numerical_flow(black_box(&x), 0.0, 1.0, 1000, false).unwrap())
    });
    group.bench_function("rk4_reproject", |b| {
        b.iter(|| numerical_flow(black_box(&x), 0.0, 1.0, 1000, true).unwrap())
    });
    group.finish();
}

criterion_group!(benches, bench_svd, bench_spectrum, bench_flow);
criterion_main!(benches);
