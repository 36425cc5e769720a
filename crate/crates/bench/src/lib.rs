//! Shared fixtures for the criterion benchmarks.

use qdescent::linalg::{matrix_from_spectrum, sample_random_orthogonal, SymmetricMatrix};
use qdescent::solvers::QuadraticProblem;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn fixture_matrix(n: usize, seed: u64) -> SymmetricMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut evs: Vec<f64> = (0..n).map(|_| rng.random_range(1.0..=100.0)).collect();
    evs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let u = sample_random_orthogonal(n, &mut rng).unwrap();
    matrix_from_spectrum(&evs, &u).unwrap()
}

pub fn fixture_problem(n: usize, seed: u64) -> QuadraticProblem {
    let a = fixture_matrix(n, seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e3779b97f4a7c15);
    let b: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect();
    QuadraticProblem::new(a, b).unwrap()
}
