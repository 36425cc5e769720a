use anyhow::Result;
use clap::Args;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qdescent::distributions::{
    conjugate_distribution, coordinate_distribution, diagonal_probabilities,
    largest_eig_distribution, rownorm_probabilities, uniform_probabilities,
};
use qdescent::experiments::{trial_rng, verify_lower_bound};
use qdescent::linalg::{
    a_norm_sq, approx_conjugate_system, jacobi_eigendecompose, matrix_from_spectrum,
    sample_random_orthogonal, sub, SymmetricMatrix,
};
use qdescent::solvers::{
    direct_conjugate_solve, perturbed_eigenpairs, run_iscond, run_issd, QuadraticProblem,
    SolverConfig,
};
use qdescent::theory::{
    construct_bad_matrix_upper, importance_counterexample, inexact_gram_bounds, issd_neighborhood,
    lambda_min_upper_bound, verify_2d_optimal_probability, w_matrix,
};

pub const THEOREM_IDS: &[&str] = &[
    "T2",
    "T3",
    "T4",
    "T5",
    "T7",
    "T-last-eigs",
    "L-ineq",
    "iSconD",
    "iSSD",
    "direct-solve",
];

#[derive(Args)]
pub struct VerifyArgs {
    /// Theorem id: T2 | T3 | T4 | T5 | T7 | T-last-eigs | L-ineq | iSconD | iSSD | direct-solve
    id: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

struct Check {
    name: String,
    /// Distance from the bound; nonnegative means the assertion holds.
    margin: f64,
}

impl Check {
    fn pass(&self) -> bool {
        self.margin >= 0.0
    }
}

pub fn run(args: VerifyArgs) -> Result<()> {
    eprintln!("seed: {}", args.seed);
    let checks = match args.id.as_str() {
        "T2" => uniform_optimal_2d(args.seed),
        "T3" => uniform_optimal_diagonal(args.seed),
        "T4" => importance_sampling_gap(),
        "T5" => adversarial_upper_bound(args.seed),
        "T7" => adversarial_lower_bound(args.seed)?,
        "T-last-eigs" => largest_eigs_futile(args.seed),
        "L-ineq" => geometric_mean_bound(args.seed),
        "iSconD" => inexact_conjugate(args.seed),
        "iSSD" => inexact_spectral(args.seed),
        "direct-solve" => direct_solve_bound(args.seed),
        other => anyhow::bail!(
            "unknown theorem id {other:?}; available: {}",
            THEOREM_IDS.join(", ")
        ),
    };
    let mut all_pass = true;
    for check in &checks {
        eprintln!(
            "{}: {} (margin {:+.3e})",
            check.name,
            if check.pass() { "PASS" } else { "FAIL" },
            check.margin
        );
        all_pass &= check.pass();
    }
    anyhow::ensure!(all_pass, "{}: at least one assertion failed", args.id);
    eprintln!("{}: all assertions hold", args.id);
    Ok(())
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_pd(n: usize, lo: f64, hi: f64, r: &mut ChaCha8Rng) -> SymmetricMatrix {
    let mut evs: Vec<f64> = (0..n).map(|_| r.random_range(lo..=hi)).collect();
    evs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let u = sample_random_orthogonal(n, r).unwrap();
    matrix_from_spectrum(&evs, &u).unwrap()
}

fn random_simplex(n: usize, r: &mut ChaCha8Rng) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| r.random_range(0.01..1.0)).collect();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|x| x / total).collect()
}

fn lambda_min_w(a: &SymmetricMatrix, p: &[f64]) -> f64 {
    let dist = coordinate_distribution(a, p).unwrap();
    jacobi_eigendecompose(&w_matrix(a, &dist).unwrap())
        .unwrap()
        .min_eigenvalue()
}

fn uniform_optimal_2d(seed: u64) -> Vec<Check> {
    let mut r = rng(seed.wrapping_add(2));
    (0..10)
        .map(|i| {
            let a = random_pd(2, 0.3, 30.0, &mut r);
            let p_star = verify_2d_optimal_probability(&a).unwrap();
            Check {
                name: format!("2x2 instance {i}: grid argmax at 1/2"),
                margin: 0.01 + 1e-12 - (p_star - 0.5).abs(),
            }
        })
        .collect()
}

fn uniform_optimal_diagonal(seed: u64) -> Vec<Check> {
    let mut r = rng(seed.wrapping_add(3));
    let n = 6usize;
    let d: Vec<f64> = (0..n).map(|_| r.random_range(0.5..=25.0)).collect();
    let a = SymmetricMatrix::diagonal(&d);
    let uniform_lmin = lambda_min_w(&a, &uniform_probabilities(n));
    let mut worst = f64::INFINITY;
    for _ in 0..500 {
        let p = random_simplex(n, &mut r);
        worst = worst.min(uniform_lmin + 1e-10 - lambda_min_w(&a, &p));
    }
    vec![Check {
        name: "diagonal matrix: uniform probabilities unbeaten over 500 draws".into(),
        margin: worst,
    }]
}

fn importance_sampling_gap() -> Vec<Check> {
    let (n, t) = (5usize, 100.0);
    let a = importance_counterexample(n, t).unwrap();
    let l_uni = lambda_min_w(&a, &uniform_probabilities(n));
    let l_diag = lambda_min_w(&a, &diagonal_probabilities(&a));
    let l_rown = lambda_min_w(&a, &rownorm_probabilities(&a));
    vec![
        Check {
            name: format!(
                "diag(t,1,..,1) with t = {t}: uniform/diagonal rate ratio {:.1} >= 20",
                l_uni / l_diag
            ),
            margin: l_uni / l_diag - 20.0,
        },
        Check {
            name: format!(
                "diag(t,1,..,1) with t = {t}: uniform/rownorm rate ratio {:.1} >= 2000",
                l_uni / l_rown
            ),
            margin: l_uni / l_rown - 2000.0,
        },
    ]
}

fn adversarial_upper_bound(seed: u64) -> Vec<Check> {
    let mut r = rng(seed.wrapping_add(5));
    let a = construct_bad_matrix_upper(3, 100.0).unwrap();
    let mut worst = f64::INFINITY;
    for _ in 0..200 {
        let p = random_simplex(3, &mut r);
        worst = worst.min(0.01 - lambda_min_w(&a, &p));
    }
    vec![Check {
        name: "constructed matrix: lambda_min(W(p)) <= 1/100 over 200 draws".into(),
        margin: worst,
    }]
}

fn adversarial_lower_bound(seed: u64) -> Result<Vec<Check>> {
    let report = verify_lower_bound(3, 50.0, 100, 2000, seed)?;
    Ok(report
        .cases
        .into_iter()
        .map(|case| Check {
            name: format!("(1-1/T)^2t floor with p = {}", case.label),
            margin: case.margin,
        })
        .collect())
}

fn largest_eigs_futile(seed: u64) -> Vec<Check> {
    let mut r = rng(seed.wrapping_add(7));
    let mut worst = f64::INFINITY;
    for _ in 0..20 {
        let n = r.random_range(3..=10);
        let a = random_pd(n, 0.5, 15.0, &mut r);
        let decomp = jacobi_eigendecompose(&a).unwrap();
        let k = r.random_range(1..n);
        let alpha = r.random_range(0.2..3.0);
        let betas: Vec<f64> = (0..n - k).map(|_| r.random_range(0.0..5.0)).collect();
        let dist = largest_eig_distribution(&a, &decomp, k, alpha, &betas).unwrap();
        let lmin = jacobi_eigendecompose(&w_matrix(&a, &dist).unwrap())
            .unwrap()
            .min_eigenvalue();
        let ceiling = decomp.min_eigenvalue() / a.trace();
        worst = worst.min(ceiling + 1e-10 - lmin);
    }
    vec![Check {
        name: "largest-eigenvector augmentation never beats lambda_1/Tr(A) (20 instances)".into(),
        margin: worst,
    }]
}

fn geometric_mean_bound(seed: u64) -> Vec<Check> {
    let mut r = rng(seed.wrapping_add(11));
    let mut worst = f64::INFINITY;
    for _ in 0..50 {
        let n = r.random_range(2..=10);
        let a = random_pd(n, 0.3, 15.0, &mut r);
        let bound = lambda_min_upper_bound(&a).unwrap();
        let p = random_simplex(n, &mut r);
        worst = worst.min(bound + 1e-10 - lambda_min_w(&a, &p));
    }
    vec![Check {
        name: "geometric-mean bound dominates lambda_min(W(p)) (50 instances)".into(),
        margin: worst,
    }]
}

fn inexact_conjugate(seed: u64) -> Vec<Check> {
    let n = 10usize;
    let eps = 1.0 / 27.0;
    let mut r = rng(seed.wrapping_add(13));
    let a = random_pd(n, 1.0, 100.0, &mut r);
    let b: Vec<f64> = (0..n)
        .map(|_| r.sample(rand_distr::StandardNormal))
        .collect();
    let problem = QuadraticProblem::new(a, b).unwrap();
    let system = approx_conjugate_system(problem.a(), eps, &mut r).unwrap();
    let dist = conjugate_distribution(&system).unwrap();
    let lmin = jacobi_eigendecompose(&w_matrix(problem.a(), &dist).unwrap())
        .unwrap()
        .min_eigenvalue();

    let trials = 500usize;
    let cfg = SolverConfig::with_iterations(300);
    let mut mean = 0.0;
    for i in 0..trials {
        let trace = run_iscond(&problem, &system, &cfg, &mut trial_rng(seed, i)).unwrap();
        mean += trace.errors[300] / trace.errors[0];
    }
    mean /= trials as f64;
    let certified = (1.0 - 1.0 / 30.0f64).powi(300) * 1.5;
    vec![
        Check {
            name: format!("eps = 1/27: measured lambda_min(W) = {lmin:.5} vs floor 1/30"),
            margin: lmin - 1.0 / 30.0,
        },
        Check {
            name: format!("mean error at t = 300 ({mean:.3e}) under certified {certified:.3e}"),
            margin: certified - mean,
        },
    ]
}

fn inexact_spectral(seed: u64) -> Vec<Check> {
    let n = 10usize;
    let mut r = rng(seed.wrapping_add(17));
    let a = random_pd(n, 1.0, 10.0, &mut r);
    let b: Vec<f64> = (0..n)
        .map(|_| r.sample(rand_distr::StandardNormal))
        .collect();
    let problem = QuadraticProblem::new(a, b).unwrap();
    let decomp = jacobi_eigendecompose(problem.a()).unwrap();
    let pairs = perturbed_eigenpairs(problem.a(), &decomp, 1e-3, &mut r).unwrap();

    let mut alignment_worst = 0.0f64;
    for pair in &pairs {
        let mut residual = problem.a().matvec(&pair.vector);
        for (res, w) in residual.iter_mut().zip(&pair.vector) {
            *res -= pair.value * w;
        }
        let alignment: f64 = pair.vector.iter().zip(&residual).map(|(w, e)| w * e).sum();
        alignment_worst = alignment_worst.max(alignment.abs());
    }
    let hood = issd_neighborhood(&problem, &pairs).unwrap();

    let trials = 300usize;
    let iterations = 1500usize;
    let cfg = SolverConfig::with_iterations(iterations);
    let mut tail = 0.0;
    for i in 0..trials {
        let trace = run_issd(&problem, &pairs, &cfg, &mut trial_rng(seed, i)).unwrap();
        tail += trace.errors[iterations - 99..=iterations]
            .iter()
            .sum::<f64>()
            / 100.0;
    }
    tail /= trials as f64;

    vec![
        Check {
            name: format!("Rayleigh eigenvalues keep w'e = 0 (worst {alignment_worst:.2e})"),
            margin: 1e-12 - alignment_worst,
        },
        Check {
            name: format!("contraction certificate q = {:.4} below 1", hood.q),
            margin: 1.0 - hood.q,
        },
        Check {
            name: format!(
                "long-run error {tail:.3e} inside neighborhood limit {:.3e} * 1.2",
                hood.limit
            ),
            margin: hood.limit * 1.2 - tail,
        },
    ]
}

fn direct_solve_bound(seed: u64) -> Vec<Check> {
    let n = 10usize;
    let mut r = rng(seed.wrapping_add(19));
    let mut checks = Vec::new();
    for &eps in &[0.0, 0.01, 1.0 / 27.0] {
        let bound = inexact_gram_bounds(n, eps).unwrap().direct_solve_rel_err_ub;
        let mut worst = f64::INFINITY;
        for _ in 0..20 {
            let a = random_pd(n, 0.5, 30.0, &mut r);
            let b: Vec<f64> = (0..n)
                .map(|_| r.sample(rand_distr::StandardNormal))
                .collect();
            let problem = QuadraticProblem::new(a, b).unwrap();
            let system = approx_conjugate_system(problem.a(), eps, &mut r).unwrap();
            let xhat = direct_conjugate_solve(&system, problem.b()).unwrap();
            let err = a_norm_sq(problem.a(), &sub(&xhat, problem.x_star()))
                .unwrap()
                .sqrt();
            let scale = a_norm_sq(problem.a(), problem.x_star()).unwrap().sqrt();
            worst = worst.min(bound * scale + 1e-8 - err);
        }
        checks.push(Check {
            name: format!("eps = {eps:.4}: direct solve error within {bound:.4} * |x*|_A"),
            margin: worst,
        });
    }
    checks
}
