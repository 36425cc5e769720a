use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use qdescent::linalg::{jacobi_eigendecompose, matrix_power};
use qdescent_bench::fixture_matrix;

fn bench_jacobi(c: &mut Criterion) {
    let mut group = c.benchmark_group("jacobi");
    for n in [10usize, 30, 60] {
        let a = fixture_matrix(n, 42);
        group.bench_function(format!("eigendecompose_n{n}"), |b| {
            b.iter(|| jacobi_eigendecompose(black_box(&a)).unwrap())
        });
    }
    group.finish();
}

fn bench_matrix_power(c: &mut Criterion) {
    let a = fixture_matrix(30, 43);
    let decomp = jacobi_eigendecompose(&a).unwrap();
    c.bench_function("matrix_power_sqrt_n30", |b| {
        b.iter(|| matrix_power(black_box(&decomp), 0.5).unwrap())
    });
}

criterion_group!(benches, bench_jacobi, bench_matrix_power);
criterion_main!(benches);
