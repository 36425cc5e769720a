use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use qdescent::distributions::{
    coordinate_distribution, diagonal_probabilities, sscd_distribution, sscd_optimal_params,
};
use qdescent::linalg::jacobi_eigendecompose;
use qdescent::solvers::{run_sd, SolverConfig};
use qdescent::theory::w_matrix;
use qdescent_bench::fixture_problem;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn bench_run_sd(c: &mut Criterion) {
    let problem = fixture_problem(30, 7);
    let decomp = jacobi_eigendecompose(problem.a()).unwrap();
    let rcd = coordinate_distribution(problem.a(), &diagonal_probabilities(problem.a())).unwrap();
    let params = sscd_optimal_params(decomp.eigenvalues(), 15).unwrap();
    let sscd = sscd_distribution(problem.a(), &decomp, &params).unwrap();
    let cfg = SolverConfig::with_iterations(1000);

    let mut group = c.benchmark_group("run_sd_1000_steps_n30");
    group.bench_function("rcd_diagonal", |b| {
        b.iter(|| {
            let mut rng = ChaCha8Rng::seed_from_u64(1);
            run_sd(black_box(&problem), black_box(&rcd), &cfg, &mut rng).unwrap()
        })
    });
    group.bench_function("sscd_k15", |b| {
        b.iter(|| {
            let mut rng = ChaCha8Rng::seed_from_u64(1);
            run_sd(black_box(&problem), black_box(&sscd), &cfg, &mut rng).unwrap()
        })
    });
    group.finish();
}

fn bench_w_matrix(c: &mut Criterion) {
    let problem = fixture_problem(30, 9);
    let rcd = coordinate_distribution(problem.a(), &diagonal_probabilities(problem.a())).unwrap();
    c.bench_function("w_matrix_n30", |b| {
        b.iter(|| w_matrix(black_box(problem.a()), black_box(&rcd)).unwrap())
    });
}

criterion_group!(benches, bench_run_sd, bench_w_matrix);
criterion_main!(benches);
