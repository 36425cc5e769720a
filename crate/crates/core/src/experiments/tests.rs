use super::*;
use crate::distributions::DistributionSpec;
use crate::theory;

#[test]
fn clustered_spectrum_point_intervals() {
    let mut r = setup_rng(1);
    let evs = spectrum_clustered(&[(5.0, 5.0, 15), (100.0, 100.0, 15)], &mut r).unwrap();
    assert_eq!(evs.len(), 30);
    assert!(evs[..15].iter().all(|&l| l == 5.0));
    assert!(evs[15..].iter().all(|&l| l == 100.0));
}

#[test]
fn clustered_spectrum_interval_membership() {
    let mut r = setup_rng(2);
    let evs = spectrum_clustered(&[(5.0, 6.0, 15), (100.0, 101.0, 15)], &mut r).unwrap();
    assert_eq!(evs.len(), 30);
    assert!(evs.windows(2).all(|w| w[0] <= w[1]));
    assert!(evs[..15].iter().all(|&l| (5.0..=6.0).contains(&l)));
    assert!(evs[15..].iter().all(|&l| (100.0..=101.0).contains(&l)));
    assert!(spectrum_clustered(&[(0.0, 1.0, 3)], &mut r).is_err());
}

#[test]
fn exp_decay_spectrum() {
    let evs = spectrum_exp_decay(0.5, 10).unwrap();
    let expected: Vec<f64> = (0..10).map(|i| 2f64.powi(i)).collect();
    assert_eq!(evs, expected);

    let near_flat = spectrum_exp_decay(0.999, 5).unwrap();
    assert!(near_flat[4] / near_flat[0] < 1.005);
    assert_eq!(spectrum_exp_decay(0.9, 1).unwrap(), vec![1.0]);
    assert!(spectrum_exp_decay(1.0, 5).is_err());
    assert!(spectrum_exp_decay(0.0, 5).is_err());
}

#[test]
fn uniform_spectrum() {
    let evs = spectrum_uniform(1.0, 60.0, 30).unwrap();
    assert_eq!(evs.len(), 30);
    assert_eq!(evs[0], 1.0);
    assert_eq!(evs[29], 60.0);
    let step = evs[1] - evs[0];
    assert!(evs.windows(2).all(|w| (w[1] - w[0] - step).abs() < 1e-12));

    assert_eq!(spectrum_uniform(1.0, 1.0, 5).unwrap(), vec![1.0; 5]);
    assert_eq!(spectrum_uniform(3.0, 9.0, 1).unwrap(), vec![3.0]);
    assert!(spectrum_uniform(0.0, 5.0, 3).is_err());
}

#[test]
fn recipe_parse_round_trip() {
    let cases = [
        "clustered:5,6,15;100,101,15",
        "uniform:1,60,30",
        "expdecay:0.5,10",
        "file:some/matrix.txt",
    ];
    for text in cases {
        let recipe = MatrixRecipe::parse(text).unwrap();
        assert_eq!(recipe.to_recipe_string(), text);
    }
    assert!(MatrixRecipe::parse("nonsense").is_err());
    assert!(MatrixRecipe::parse("uniform:1,60").is_err());
    assert!(MatrixRecipe::parse("clustered:5,6").is_err());
}

#[test]
fn monte_carlo_single_trial_is_a_normalized_trace() {
    let spec = ExperimentSpec {
        name: "single".into(),
        matrix: "uniform:1,10,6".into(),
        methods: vec![MethodSpec::sd(DistributionSpec::DiagonalCoordinate)],
        trials: 1,
        iterations: 40,
        seed: 7,
        output_prefix: String::new(),
    };
    let runs = monte_carlo(&spec).unwrap();
    let trace = &runs[0].trace;
    assert_eq!(trace.mean.len(), 41);
    assert_eq!(trace.mean[0], 1.0);
    assert!(trace.stderr.iter().all(|&s| s == 0.0));
    assert!(!trace.degenerate);
}

#[test]
fn monte_carlo_is_bit_deterministic() {
    let spec = ExperimentSpec {
        name: "det".into(),
        matrix: "clustered:1,2,4;8,9,4".into(),
        methods: vec![
            MethodSpec::sscd_optimal(2),
            MethodSpec::Iscond { eps: 0.02 },
            MethodSpec::Issd { perturbation: 1e-3 },
        ],
        trials: 50,
        iterations: 30,
        seed: 11,
        output_prefix: String::new(),
    };
    let a = monte_carlo(&spec).unwrap();
    let b = monte_carlo(&spec).unwrap();
    for (ra, rb) in a.iter().zip(&b) {
        let csv_a = mean_trace_csv(
            &ra.trace,
            &ra.method.label(),
            ra.method.k(),
            ra.method.tau(),
            spec.seed,
        );
        let csv_b = mean_trace_csv(
            &rb.trace,
            &rb.method.label(),
            rb.method.k(),
            rb.method.tau(),
            spec.seed,
        );
        assert_eq!(csv_a, csv_b);
    }
}

#[test]
fn degenerate_start_is_flagged_and_zeroed() {
    let spec = ExperimentSpec {
        name: "degenerate".into(),
        matrix: "uniform:1,5,4".into(),
        methods: vec![MethodSpec::sd(DistributionSpec::UniformCoordinate)],
        trials: 3,
        iterations: 10,
        seed: 13,
        output_prefix: String::new(),
    };
    // Recover x_* for this seed's problem by running the setup path once.
    let recipe = MatrixRecipe::parse(&spec.matrix).unwrap();
    let mut setup = setup_rng(spec.seed);
    let (a, _) = recipe.build(&mut setup).unwrap();
    let b: Vec<f64> = (0..4)
        .map(|_| setup.sample(rand_distr::StandardNormal))
        .collect();
    let problem = QuadraticProblem::new(a, b).unwrap();

    let runs = monte_carlo_with_x0(&spec, Some(problem.x_star())).unwrap();
    let trace = &runs[0].trace;
    assert!(trace.degenerate);
    assert!(trace.mean.iter().all(|&m| m == 0.0));
}

#[test]
fn stderr_shrinks_like_inverse_sqrt_trials() {
    let base = ExperimentSpec {
        name: "se".into(),
        matrix: "uniform:1,8,8".into(),
        methods: vec![MethodSpec::sd(DistributionSpec::DiagonalCoordinate)],
        trials: 250,
        iterations: 25,
        seed: 17,
        output_prefix: String::new(),
    };
    let small = monte_carlo(&base).unwrap();
    let mut big_spec = base.clone();
    big_spec.trials = 1000;
    let big = monte_carlo(&big_spec).unwrap();
    let t = 20;
    let ratio = small[0].trace.stderr[t] / big[0].trace.stderr[t];
    assert!(
        (1.6..=2.4).contains(&ratio),
        "quadrupling trials should halve the standard error, ratio = {ratio}"
    );
}

/// Empirical per-step contraction of the mean trace stays inside the
/// second-moment band derived from W: [1-w(2-w)l_max, 1-w(2-w)l_min] at
/// tau = 1 and its mini-batch generalization otherwise.
#[test]
fn per_step_contraction_within_band() {
    for (tau, omega) in [(1usize, 1.0f64), (4, 1.0)] {
        let spec = ExperimentSpec {
            name: "band".into(),
            matrix: "uniform:1,9,8".into(),
            methods: vec![MethodSpec::Sd {
                distribution: DistributionSpec::DiagonalCoordinate,
                tau,
                omega: Some(omega),
            }],
            trials: 3000,
            iterations: 21,
            seed: 19,
            output_prefix: String::new(),
        };
        let runs = monte_carlo(&spec).unwrap();
        let trace = &runs[0].trace;

        // reproduce the matrix to eigensolve W
        let recipe = MatrixRecipe::parse(&spec.matrix).unwrap();
        let mut setup = setup_rng(spec.seed);
        let (a, _decomp) = recipe.build(&mut setup).unwrap();
        let dist = crate::distributions::coordinate_distribution(
            &a,
            &crate::distributions::diagonal_probabilities(&a),
        )
        .unwrap();
        let w = theory::w_matrix(&a, &dist).unwrap();
        let w_eigs = crate::linalg::jacobi_eigendecompose(&w).unwrap();
        let t_f = tau as f64;
        let g =
            |l: f64| 1.0 - 2.0 * omega * l + omega * omega * (l / t_f + (1.0 - 1.0 / t_f) * l * l);
        let g_min = w_eigs
            .eigenvalues()
            .iter()
            .map(|&l| g(l))
            .fold(f64::INFINITY, f64::min);
        let g_max = w_eigs
            .eigenvalues()
            .iter()
            .map(|&l| g(l))
            .fold(f64::NEG_INFINITY, f64::max);

        for t in 0..20 {
            let ratio = trace.mean[t + 1] / trace.mean[t];
            let widen = 4.0
                * ratio
                * (trace.stderr[t + 1] / trace.mean[t + 1] + trace.stderr[t] / trace.mean[t]);
            assert!(
                ratio >= g_min - widen && ratio <= g_max + widen,
                "tau = {tau}, t = {t}: ratio {ratio} outside [{g_min}, {g_max}] ± {widen}"
            );
        }
        // the cumulative sandwich follows from the per-step band
        for t in [5usize, 10, 20] {
            let upper = g_max.powi(t as i32);
            let lower = g_min.powi(t as i32);
            assert!(trace.mean[t] <= upper + 4.0 * trace.stderr[t]);
            assert!(trace.mean[t] >= lower - 4.0 * trace.stderr[t]);
        }
    }
}

/// Spectral sampling has W = I/n, so the mini-batch step at the optimal
/// stepsize contracts the expected error by exactly rho_opt. Enumerating
/// every tau-tuple of directions checks the identity without sampling noise
/// (the Monte Carlo mean of this process is dominated by rare large
/// realizations once omega(tau) grows past 2, so an empirical two-sided
/// check at large t is not statistically sound).
#[test]
fn minibatch_spectral_one_step_contraction_is_exact() {
    let (n, tau) = (6usize, 3usize);
    let mut r = setup_rng(31);
    let evs = spectrum_uniform(1.0, 20.0, n).unwrap();
    let u = crate::linalg::sample_random_orthogonal(n, &mut r).unwrap();
    let a = crate::linalg::matrix_from_spectrum(&evs, &u).unwrap();
    let decomp = crate::linalg::SpectralDecomposition::new(evs, u).unwrap();
    use rand::Rng;
    let b: Vec<f64> = (0..n).map(|_| r.sample(rand_distr::StandardNormal)).collect();
    let problem = QuadraticProblem::new(a.clone(), b).unwrap();
    let dist = crate::distributions::uniform_spectral_distribution(&decomp).unwrap();

    let rate = theory::minibatch_rate(1.0 / n as f64, 1.0 / n as f64, 1.0, tau).unwrap();
    let omega = rate.omega_opt;

    let x: Vec<f64> = (0..n).map(|_| r.sample(rand_distr::StandardNormal)).collect();
    let err = problem.error_a_norm_sq(&x).unwrap();
    let residual = {
        let mut res = a.matvec(&x);
        crate::linalg::axpy(&mut res, -1.0, problem.b());
        res
    };

    // all n^tau equally likely batches
    let mut expected = 0.0;
    for batch in 0..n.pow(tau as u32) {
        let mut code = batch;
        let mut xn = x.clone();
        for _ in 0..tau {
            let j = code % n;
            code /= n;
            let s = dist.direction(j);
            let sas = crate::linalg::dot(s, &a.matvec(s));
            let c = omega / tau as f64 * crate::linalg::dot(s, &residual) / sas;
            crate::linalg::axpy(&mut xn, -c, s);
        }
        expected += problem.error_a_norm_sq(&xn).unwrap();
    }
    expected /= n.pow(tau as u32) as f64;
    assert!(
        (expected - rate.rho_opt * err).abs() <= 1e-10 * err,
        "{expected} vs {}",
        rate.rho_opt * err
    );
}

/// Fully augmented coordinate sampling (k = n-1) also has W = I/n; on the
/// two-cluster matrix the mean contraction matches (1 - 1/30)^t two-sided.
#[test]
fn phase_transition_full_augmentation_hits_exact_rate() {
    let spec = phase_transition_spec(100.0, 1.0, &[29], 800, 37);
    let mut spec = spec;
    spec.iterations = 40;
    let runs = monte_carlo(&spec).unwrap();
    let trace = &runs[0].trace;
    for &t in &[10usize, 25, 40] {
        let want = (1.0 - 1.0 / 30.0f64).powi(t as i32);
        assert!(
            (trace.mean[t] - want).abs() <= 4.0 * trace.stderr[t],
            "t = {t}: {} vs {want}",
            trace.mean[t]
        );
    }
}

#[test]
fn rate_jump_at_the_cluster_boundary() {
    // degenerate clusters (delta = 0): 15 eigenvalues at 5 and 15 at theta.
    // Crossing k over the cluster size multiplies the rate by >= theta/10.
    let theta = 100.0;
    let mut r = setup_rng(29);
    let evs = spectrum_clustered(&[(5.0, 5.0, 15), (theta, theta, 15)], &mut r).unwrap();
    let below = theory::sscd_rate(&evs, 14).unwrap();
    let above = theory::sscd_rate(&evs, 15).unwrap();
    assert!(
        above / below >= theta / 5.0 * 0.5,
        "jump factor {} below {}",
        above / below,
        theta / 10.0
    );
}

#[test]
fn crossing_iteration_finds_first_threshold_hit() {
    let trace = MeanTrace {
        mean: vec![1.0, 0.5, 0.09, 0.01],
        stderr: vec![0.0; 4],
        trials: 1,
        degenerate: false,
    };
    assert_eq!(trace.crossing_iteration(0.1), Some(2));
    assert_eq!(trace.crossing_iteration(1e-9), None);
}

#[test]
fn lower_bound_verifier_passes_on_adversarial_matrix() {
    let report = verify_lower_bound(3, 50.0, 60, 400, 23).unwrap();
    assert_eq!(report.cases.len(), 12);
    assert!(
        report.pass,
        "min margin = {} over {:?}",
        report.min_margin,
        report
            .cases
            .iter()
            .map(|c| (c.label.clone(), c.margin))
            .collect::<Vec<_>>()
    );
}

#[test]
fn preset_builders_have_expected_shapes() {
    let pt = preset_spec("phase-transition", None, None, 1).unwrap();
    assert_eq!(pt.methods.len(), 6);
    assert!(pt.matrix.starts_with("clustered:5,6,15;100,101,15"));

    let mb = preset_spec("minibatch", Some(10), Some(20), 1).unwrap();
    assert_eq!(mb.methods.len(), 24);
    assert_eq!(mb.trials, 10);
    assert_eq!(mb.iterations, 20);

    let ed = preset_spec("expdecay", None, None, 1).unwrap();
    assert_eq!(ed.methods.len(), 10);

    let inexact = preset_spec("inexact", None, None, 1).unwrap();
    assert_eq!(inexact.methods.len(), 4);

    assert!(preset_spec("no-such-preset", None, None, 1).is_err());
    match preset_spec("no-such-preset", None, None, 1) {
        Err(Error::InvalidParameter(msg)) => assert!(msg.contains("phase-transition")),
        other => panic!("expected listing error, got {other:?}"),
    }
}

#[test]
fn method_spec_serde_round_trip() {
    let methods = vec![
        MethodSpec::Sd {
            distribution: DistributionSpec::Sscd {
                k: 18,
                alpha: None,
                betas: None,
            },
            tau: 4,
            omega: None,
        },
        MethodSpec::Iscond { eps: 1.0 / 27.0 },
        MethodSpec::Issd { perturbation: 1e-3 },
    ];
    let json = serde_json::to_string(&methods).unwrap();
    let back: Vec<MethodSpec> = serde_json::from_str(&json).unwrap();
    assert_eq!(methods, back);
}
