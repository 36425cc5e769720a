use std::path::PathBuf;

use anyhow::Result;
use clap::Args;

use qdescent::experiments::{setup_rng, MatrixRecipe};
use qdescent::linalg::jacobi_eigendecompose;
use qdescent::theory::{minibatch_rate, w_matrix};
use qdescent::DistributionSpec;

#[derive(Args)]
pub struct RatesArgs {
    /// Matrix recipe or path to a matrix text file
    #[arg(long)]
    matrix: String,
    /// Comma-separated augmentation sizes for sscd rows, or "all"
    #[arg(long, default_value = "all")]
    ks: String,
    /// Comma-separated mini-batch sizes
    #[arg(long, default_value = "1")]
    taus: String,
    /// Comma-separated distribution kinds to tabulate
    #[arg(
        long,
        default_value = "diagonal-coordinate,uniform-coordinate,rownorm-coordinate,spectral,conjugate,sscd"
    )]
    methods: String,
    /// Conjugacy tolerance for the conjugate rows
    #[arg(long, default_value_t = 0.0)]
    eps: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

pub fn run(args: RatesArgs) -> Result<()> {
    eprintln!("seed: {}", args.seed);
    let recipe = MatrixRecipe::parse(&super::matrix_recipe_from_arg(&args.matrix))?;
    let mut setup = setup_rng(args.seed);
    let (a, decomp) = recipe.build(&mut setup)?;
    let n = a.dim();

    let ks: Vec<usize> = if args.ks == "all" {
        (0..n).collect()
    } else {
        super::parse_usize_list(&args.ks)?
    };
    let taus = super::parse_usize_list(&args.taus)?;

    let mut rows = String::from("method,k,tau,lambda_min_W,lambda_max_W,contraction,complexity\n");
    for method in args.methods.split(',') {
        let method = method.trim();
        let specs: Vec<(DistributionSpec, usize)> = match method {
            "sscd" => ks
                .iter()
                .map(|&k| {
                    (
                        DistributionSpec::Sscd {
                            k,
                            alpha: None,
                            betas: None,
                        },
                        k,
                    )
                })
                .collect(),
            other => vec![(
                super::distribution_spec_from_flags(other, None, None, None, None, args.eps, &a)?,
                0,
            )],
        };
        for (spec, k) in specs {
            let dist = spec.resolve(&a, &decomp, &mut setup)?;
            let w_eigs = jacobi_eigendecompose(&w_matrix(&a, &dist)?)?;
            let (lmin, lmax) = (w_eigs.min_eigenvalue(), w_eigs.max_eigenvalue());
            for &tau in &taus {
                // optimal stepsize per batch size; tau = 1 gives omega = 1
                let rate = minibatch_rate(lmin, lmax, 1.0, tau)?;
                let contraction = rate.rho_opt;
                let complexity = rate.xi / lmin;
                rows.push_str(&format!(
                    "{label},{k},{tau},{lmin},{lmax},{contraction},{complexity}\n",
                    label = spec.label()
                ));
            }
        }
    }

    std::fs::create_dir_all(&args.out)?;
    let path = args.out.join("rates.csv");
    std::fs::write(&path, rows)?;
    eprintln!("rate table written to {}", path.display());
    Ok(())
}
