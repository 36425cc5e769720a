use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;

use qdescent::distributions::conjugate_distribution;
use qdescent::experiments::{
    csv_file_name, mean_trace_csv, setup_rng, trial_rng, MatrixRecipe, MeanTrace, MethodSpec,
};
use qdescent::linalg::{approx_conjugate_system, jacobi_eigendecompose};
use qdescent::solvers::{
    perturbed_eigenpairs, run_iscond, run_issd, run_minibatch_sd, run_sd, ConvergenceTrace,
    QuadraticProblem, SolverConfig,
};
use qdescent::theory::{issd_neighborhood, minibatch_rate, w_matrix};
use rand::Rng;
use rand_distr::StandardNormal;

#[derive(Args)]
pub struct SolveArgs {
    /// Matrix recipe (clustered:…, uniform:…, expdecay:…) or path to a matrix text file
    #[arg(long)]
    matrix: String,
    /// Right-hand side: "random", "zero", or a path to a whitespace-separated vector file
    #[arg(long, default_value = "random")]
    rhs: String,
    /// Method: uniform-coordinate | diagonal-coordinate | rownorm-coordinate |
    /// custom-coordinate | spectral | conjugate | sscd | sscd-largest | iscond | issd
    #[arg(long)]
    method: String,
    /// Number of augmenting eigenvectors (sscd/sscd-largest)
    #[arg(long)]
    k: Option<usize>,
    /// Coordinate weight alpha (sscd/sscd-largest with explicit betas)
    #[arg(long)]
    alpha: Option<f64>,
    /// Comma-separated betas, or "optimal" (sscd default)
    #[arg(long)]
    betas: Option<String>,
    /// Comma-separated probabilities (custom-coordinate)
    #[arg(long)]
    p: Option<String>,
    /// Conjugacy tolerance (conjugate/iscond) or eigenvector perturbation (issd)
    #[arg(long, default_value_t = 0.0)]
    eps: f64,
    /// Stepsize; defaults to 1 (or 1/xi(tau) for mini-batch runs)
    #[arg(long)]
    omega: Option<f64>,
    /// Mini-batch size
    #[arg(long, default_value_t = 1)]
    tau: usize,
    #[arg(long, default_value_t = 300)]
    iterations: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory for the trace CSV
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

pub fn run(args: SolveArgs) -> Result<()> {
    eprintln!("seed: {}", args.seed);
    let recipe = MatrixRecipe::parse(&super::matrix_recipe_from_arg(&args.matrix))?;
    let mut setup = setup_rng(args.seed);
    let (a, decomp) = recipe.build(&mut setup)?;
    let n = a.dim();

    let b: Vec<f64> = match args.rhs.as_str() {
        "random" => (0..n).map(|_| setup.sample(StandardNormal)).collect(),
        "zero" => vec![0.0; n],
        path => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading right-hand side {path:?}"))?;
            let values =
                super::parse_f64_list(&text.split_whitespace().collect::<Vec<_>>().join(","))?;
            anyhow::ensure!(
                values.len() == n,
                "right-hand side has {} entries, matrix has dimension {n}",
                values.len()
            );
            values
        }
    };
    let problem = QuadraticProblem::new(a, b)?;

    let mut run_rng = trial_rng(args.seed, 0);
    let (method_spec, trace): (MethodSpec, ConvergenceTrace) = match args.method.as_str() {
        "iscond" => {
            let system = approx_conjugate_system(problem.a(), args.eps, &mut setup)?;
            let dist = conjugate_distribution(&system)?;
            let lmin = jacobi_eigendecompose(&w_matrix(problem.a(), &dist)?)?.min_eigenvalue();
            eprintln!(
                "theory: per-step contraction 1 - lambda_min(W) = {}",
                1.0 - lmin
            );
            let cfg = SolverConfig::with_iterations(args.iterations);
            let trace = run_iscond(&problem, &system, &cfg, &mut run_rng)?;
            (MethodSpec::Iscond { eps: args.eps }, trace)
        }
        "issd" => {
            let pairs = perturbed_eigenpairs(problem.a(), &decomp, args.eps, &mut setup)?;
            let hood = issd_neighborhood(&problem, &pairs)?;
            eprintln!(
                "theory: q = {}, r0 = {}, neighborhood limit = {}",
                hood.q, hood.r0, hood.limit
            );
            let cfg = SolverConfig::with_iterations(args.iterations);
            let trace = run_issd(&problem, &pairs, &cfg, &mut run_rng)?;
            (
                MethodSpec::Issd {
                    perturbation: args.eps,
                },
                trace,
            )
        }
        method => {
            let spec = super::distribution_spec_from_flags(
                method,
                args.k,
                args.alpha,
                args.betas.as_deref(),
                args.p.as_deref(),
                args.eps,
                problem.a(),
            )?;
            let dist = spec.resolve(problem.a(), &decomp, &mut setup)?;
            let w_eigs = jacobi_eigendecompose(&w_matrix(problem.a(), &dist)?)?;
            let (lmin, lmax) = (w_eigs.min_eigenvalue(), w_eigs.max_eigenvalue());
            let xi = 1.0 / args.tau as f64 + (1.0 - 1.0 / args.tau as f64) * lmax;
            let omega = args.omega.unwrap_or(1.0 / xi);
            let rate = minibatch_rate(lmin, lmax, omega, args.tau)?;
            eprintln!(
                "theory: per-step contraction rho(omega = {omega}, tau = {}) = {}",
                args.tau, rate.rho
            );
            let cfg = SolverConfig {
                omega,
                tau: args.tau,
                iterations: args.iterations,
                x0: None,
            };
            let trace = if args.tau == 1 {
                run_sd(&problem, &dist, &cfg, &mut run_rng)?
            } else {
                run_minibatch_sd(&problem, &dist, &cfg, &mut run_rng)?
            };
            (
                MethodSpec::Sd {
                    distribution: spec,
                    tau: args.tau,
                    omega: Some(omega),
                },
                trace,
            )
        }
    };

    let rel: Vec<f64> = if trace.errors[0] == 0.0 {
        vec![0.0; trace.errors.len()]
    } else {
        trace.errors.iter().map(|e| e / trace.errors[0]).collect()
    };
    eprintln!("final relative error: {}", rel.last().unwrap());

    let mean_trace = MeanTrace {
        stderr: vec![0.0; rel.len()],
        mean: rel,
        trials: 1,
        degenerate: trace.errors[0] == 0.0,
    };
    std::fs::create_dir_all(&args.out)?;
    let name = csv_file_name(
        "solve",
        &method_spec.label(),
        method_spec.k(),
        method_spec.tau(),
    );
    let path = args.out.join(name);
    std::fs::write(
        &path,
        mean_trace_csv(
            &mean_trace,
            &method_spec.label(),
            method_spec.k(),
            method_spec.tau(),
            args.seed,
        ),
    )?;
    eprintln!("trace written to {}", path.display());
    Ok(())
}
