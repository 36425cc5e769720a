//! Seeded Monte Carlo harness, spectrum generators, experiment presets and
//! CSV serialization.
//!
//! Reproducibility contract: every run is a pure function of the
//! [`ExperimentSpec`] including its master seed. Matrix and distribution
//! setup draw from a dedicated RNG stream; trial `i` draws from stream `i`.
//! Trials may execute concurrently (rayon), but reduction happens in trial
//! order, so output files are bit-identical across reruns and thread counts.

use std::io::Write as _;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::DistributionSpec;
use crate::error::{Error, Result};
use crate::linalg::{
    jacobi_eigendecompose, load_matrix_text, matrix_from_spectrum, matrix_power,
    sample_random_orthogonal, SpectralDecomposition, SymmetricMatrix,
};
use crate::solvers::{
    perturbed_eigenpairs, ConvergenceTrace, PreparedIscond, PreparedIssd, PreparedSd,
    QuadraticProblem,
};
use crate::theory;

/// RNG stream reserved for matrix/distribution construction; trials use
/// streams 0..trials.
const SETUP_STREAM: u64 = u64::MAX;

pub fn setup_rng(seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(SETUP_STREAM);
    rng
}

pub fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

// ---------------------------------------------------------------------------
// spectra

/// Eigenvalues drawn uniformly from per-cluster intervals, sorted ascending.
pub fn spectrum_clustered<R: Rng + ?Sized>(
    clusters: &[(f64, f64, usize)],
    rng: &mut R,
) -> Result<Vec<f64>> {
    if clusters.is_empty() {
        return Err(Error::InvalidParameter("no clusters given".into()));
    }
    let mut evs = Vec::new();
    for &(lo, hi, count) in clusters {
        if !(lo > 0.0 && lo <= hi) {
            return Err(Error::InvalidParameter(format!(
                "cluster interval [{lo}, {hi}] must satisfy 0 < lo <= hi"
            )));
        }
        for _ in 0..count {
            evs.push(rng.random_range(lo..=hi));
        }
    }
    evs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(evs)
}

/// Geometric spectrum with ratio 1/alpha, smallest eigenvalue 1:
/// (1, 1/α, …, (1/α)^{n-1}).
pub fn spectrum_exp_decay(alpha: f64, n: usize) -> Result<Vec<f64>> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "decay factor alpha = {alpha} must lie in (0, 1)"
        )));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("need n >= 1".into()));
    }
    Ok((0..n).map(|i| (1.0 / alpha).powi(i as i32)).collect())
}

/// Arithmetic grid λᵢ = lo + (i-1)(hi-lo)/(n-1); a single point collapses to lo.
pub fn spectrum_uniform(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && lo <= hi) {
        return Err(Error::InvalidParameter(format!(
            "interval [{lo}, {hi}] must satisfy 0 < lo <= hi"
        )));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("need n >= 1".into()));
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    Ok((0..n)
        .map(|i| lo + i as f64 * (hi - lo) / (n - 1) as f64)
        .collect())
}

// ---------------------------------------------------------------------------
// matrix recipes

/// How the experiment matrix is produced: a generated spectrum (plus a random
/// orthogonal basis) or a matrix file in the text format.
#[derive(Clone, Debug, PartialEq)]
pub enum MatrixRecipe {
    Clustered(Vec<(f64, f64, usize)>),
    Uniform { lo: f64, hi: f64, n: usize },
    ExpDecay { alpha: f64, n: usize },
    File(PathBuf),
}

impl MatrixRecipe {
    /// Parses recipe strings: `clustered:5,6,15;100,101,15`,
    /// `uniform:1,60,30`, `expdecay:0.5,10`, `file:matrix.txt`.
    pub fn parse(text: &str) -> Result<Self> {
        let (kind, rest) = text
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("matrix recipe {text:?} has no kind prefix")))?;
        match kind {
            "clustered" => {
                let mut clusters = Vec::new();
                for part in rest.split(';') {
                    let fields: Vec<&str> = part.split(',').collect();
                    if fields.len() != 3 {
                        return Err(Error::Parse(format!(
                            "cluster {part:?} must be lo,hi,count"
                        )));
                    }
                    clusters.push((
                        parse_f64(fields[0])?,
                        parse_f64(fields[1])?,
                        parse_usize(fields[2])?,
                    ));
                }
                Ok(MatrixRecipe::Clustered(clusters))
            }
            "uniform" => {
                let fields: Vec<&str> = rest.split(',').collect();
                if fields.len() != 3 {
                    return Err(Error::Parse("uniform recipe must be lo,hi,n".into()));
                }
                Ok(MatrixRecipe::Uniform {
                    lo: parse_f64(fields[0])?,
                    hi: parse_f64(fields[1])?,
                    n: parse_usize(fields[2])?,
                })
            }
            "expdecay" => {
                let fields: Vec<&str> = rest.split(',').collect();
                if fields.len() != 2 {
                    return Err(Error::Parse("expdecay recipe must be alpha,n".into()));
                }
                Ok(MatrixRecipe::ExpDecay {
                    alpha: parse_f64(fields[0])?,
                    n: parse_usize(fields[1])?,
                })
            }
            "file" => Ok(MatrixRecipe::File(PathBuf::from(rest))),
            other => Err(Error::Parse(format!(
                "unknown matrix recipe kind {other:?} (expected clustered, uniform, expdecay or file)"
            ))),
        }
    }

    pub fn to_recipe_string(&self) -> String {
        match self {
            MatrixRecipe::Clustered(clusters) => {
                let parts: Vec<String> = clusters
                    .iter()
                    .map(|(lo, hi, c)| format!("{lo},{hi},{c}"))
                    .collect();
                format!("clustered:{}", parts.join(";"))
            }
            MatrixRecipe::Uniform { lo, hi, n } => format!("uniform:{lo},{hi},{n}"),
            MatrixRecipe::ExpDecay { alpha, n } => format!("expdecay:{alpha},{n}"),
            MatrixRecipe::File(p) => format!("file:{}", p.display()),
        }
    }

    /// Builds the matrix and its decomposition. Generated recipes consume the
    /// RNG in a fixed order: spectrum first, then the orthogonal basis.
    pub fn build<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
    ) -> Result<(SymmetricMatrix, SpectralDecomposition)> {
        match self {
            MatrixRecipe::File(path) => {
                let a = load_matrix_text(path)?;
                let decomp = jacobi_eigendecompose(&a)?;
                if !decomp.is_positive_definite() {
                    return Err(Error::NotPositiveDefinite);
                }
                Ok((a, decomp))
            }
            _ => {
                let evs = match self {
                    MatrixRecipe::Clustered(clusters) => spectrum_clustered(clusters, rng)?,
                    MatrixRecipe::Uniform { lo, hi, n } => spectrum_uniform(*lo, *hi, *n)?,
                    MatrixRecipe::ExpDecay { alpha, n } => spectrum_exp_decay(*alpha, *n)?,
                    MatrixRecipe::File(_) => unreachable!(),
                };
                let u = sample_random_orthogonal(evs.len(), rng)?;
                let a = matrix_from_spectrum(&evs, &u)?;
                let decomp = SpectralDecomposition::new(evs, u)?;
                Ok((a, decomp))
            }
        }
    }
}

fn parse_f64(t: &str) -> Result<f64> {
    t.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("cannot parse {t:?} as a number")))
}

fn parse_usize(t: &str) -> Result<usize> {
    t.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("cannot parse {t:?} as a count")))
}

// ---------------------------------------------------------------------------
// experiment specification

/// One method variant inside an experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "kebab-case")]
pub enum MethodSpec {
    /// Stochastic descent (mini-batched when tau > 1) over a distribution.
    /// `omega = None` means the optimal stepsize: 1 for tau = 1, 1/ξ(τ)
    /// otherwise.
    Sd {
        distribution: DistributionSpec,
        #[serde(default = "default_tau")]
        tau: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        omega: Option<f64>,
    },
    /// Conjugate descent on an ε-approximate system built for the run.
    Iscond { eps: f64 },
    /// Spectral descent on perturbed eigenpairs with Rayleigh-quotient
    /// eigenvalues.
    Issd { perturbation: f64 },
}

fn default_tau() -> usize {
    1
}

impl MethodSpec {
    pub fn sd(distribution: DistributionSpec) -> Self {
        MethodSpec::Sd {
            distribution,
            tau: 1,
            omega: None,
        }
    }

    pub fn sscd_optimal(k: usize) -> Self {
        MethodSpec::sd(DistributionSpec::Sscd {
            k,
            alpha: None,
            betas: None,
        })
    }

    pub fn label(&self) -> String {
        match self {
            MethodSpec::Sd { distribution, .. } => distribution.label(),
            MethodSpec::Iscond { eps } => format!("iscond-eps{eps:.4}"),
            MethodSpec::Issd { .. } => "issd".into(),
        }
    }

    pub fn k(&self) -> usize {
        match self {
            MethodSpec::Sd { distribution, .. } => distribution.k(),
            _ => 0,
        }
    }

    pub fn tau(&self) -> usize {
        match self {
            MethodSpec::Sd { tau, .. } => *tau,
            _ => 1,
        }
    }
}

/// Full description of a Monte Carlo experiment; the master seed pins every
/// random choice.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub name: String,
    /// Recipe string, see [`MatrixRecipe::parse`].
    pub matrix: String,
    pub methods: Vec<MethodSpec>,
    pub trials: usize,
    pub iterations: usize,
    pub seed: u64,
    #[serde(default)]
    pub output_prefix: String,
}

impl ExperimentSpec {
    pub fn prefix(&self) -> &str {
        if self.output_prefix.is_empty() {
            &self.name
        } else {
            &self.output_prefix
        }
    }
}

/// Monte-Carlo-averaged relative error trace with per-iteration standard
/// errors.
#[derive(Clone, Debug)]
pub struct MeanTrace {
    pub mean: Vec<f64>,
    pub stderr: Vec<f64>,
    pub trials: usize,
    /// Set when a trial started exactly at x_*; the relative error is 0/0,
    /// so the harness emits zeros instead of dividing.
    pub degenerate: bool,
}

impl MeanTrace {
    /// First iteration at which the mean relative error drops to `threshold`;
    /// `None` if it never does within the trace.
    pub fn crossing_iteration(&self, threshold: f64) -> Option<usize> {
        self.mean.iter().position(|&m| m <= threshold)
    }
}

/// Result of one method inside an experiment.
#[derive(Clone, Debug)]
pub struct MethodRun {
    pub method: MethodSpec,
    pub trace: MeanTrace,
}

// ---------------------------------------------------------------------------
// harness

enum Prepared<'a> {
    Sd(PreparedSd<'a>),
    Iscond(PreparedIscond<'a>),
    Issd(PreparedIssd<'a>),
}

impl Prepared<'_> {
    fn run<R: Rng + ?Sized>(
        &self,
        iterations: usize,
        x0: Option<&[f64]>,
        rng: &mut R,
    ) -> Result<ConvergenceTrace> {
        match self {
            Prepared::Sd(e) => e.run(iterations, x0, rng),
            Prepared::Iscond(e) => e.run(iterations, x0, rng),
            Prepared::Issd(e) => e.run(iterations, x0, rng),
        }
    }
}

fn prepare_method<'a, R: Rng + ?Sized>(
    problem: &'a QuadraticProblem,
    decomp: &SpectralDecomposition,
    method: &MethodSpec,
    rng: &mut R,
) -> Result<Prepared<'a>> {
    match method {
        MethodSpec::Sd {
            distribution,
            tau,
            omega,
        } => {
            let dist = distribution.resolve(problem.a(), decomp, rng)?;
            let gap = crate::distributions::properness_gap(problem.a(), &dist)?;
            if gap <= 1e-12 {
                return Err(Error::ImproperDistribution { lambda_min: gap });
            }
            let tau = *tau;
            if tau < 1 {
                return Err(Error::InvalidParameter("tau must be >= 1".into()));
            }
            let omega = match omega {
                Some(w) => {
                    let w_mat = theory::w_matrix(problem.a(), &dist)?;
                    let lmax = jacobi_eigendecompose(&w_mat)?.max_eigenvalue();
                    let xi = 1.0 / tau as f64 + (1.0 - 1.0 / tau as f64) * lmax;
                    if !(*w > 0.0 && *w < 2.0 / xi) {
                        return Err(Error::InvalidParameter(format!(
                            "stepsize omega = {w} outside (0, 2/xi) with xi = {xi}"
                        )));
                    }
                    *w
                }
                None if tau == 1 => 1.0,
                None => {
                    let w_mat = theory::w_matrix(problem.a(), &dist)?;
                    let lmax = jacobi_eigendecompose(&w_mat)?.max_eigenvalue();
                    let xi = 1.0 / tau as f64 + (1.0 - 1.0 / tau as f64) * lmax;
                    1.0 / xi
                }
            };
            Ok(Prepared::Sd(PreparedSd::new(problem, &dist, omega, tau)?))
        }
        MethodSpec::Iscond { eps } => {
            let system = crate::linalg::approx_conjugate_system(problem.a(), *eps, rng)?;
            Ok(Prepared::Iscond(PreparedIscond::new(problem, &system)?))
        }
        MethodSpec::Issd { perturbation } => {
            let pairs = perturbed_eigenpairs(problem.a(), decomp, *perturbation, rng)?;
            Ok(Prepared::Issd(PreparedIssd::new(problem, &pairs)?))
        }
    }
}

fn mean_trace_from_trials(traces: &[ConvergenceTrace]) -> MeanTrace {
    let trials = traces.len();
    let len = traces[0].errors.len();
    if traces.iter().any(|t| t.errors[0] == 0.0) {
        return MeanTrace {
            mean: vec![0.0; len],
            stderr: vec![0.0; len],
            trials,
            degenerate: true,
        };
    }
    let mut mean = vec![0.0; len];
    for trace in traces {
        let inv0 = 1.0 / trace.errors[0];
        for (m, &e) in mean.iter_mut().zip(&trace.errors) {
            *m += e * inv0;
        }
    }
    for m in mean.iter_mut() {
        *m /= trials as f64;
    }
    let mut stderr = vec![0.0; len];
    if trials > 1 {
        for trace in traces {
            let inv0 = 1.0 / trace.errors[0];
            for (s, (&e, &m)) in stderr.iter_mut().zip(trace.errors.iter().zip(&mean)) {
                let d = e * inv0 - m;
                *s += d * d;
            }
        }
        let denom = (trials * (trials - 1)) as f64;
        for s in stderr.iter_mut() {
            *s = (*s / denom).sqrt();
        }
    }
    MeanTrace {
        mean,
        stderr,
        trials,
        degenerate: false,
    }
}

/// Runs every trial of one prepared method; trial `i` owns RNG stream `i`.
fn monte_carlo_trials(
    prepared: &Prepared<'_>,
    trials: usize,
    iterations: usize,
    seed: u64,
    x0: Option<&[f64]>,
) -> Result<Vec<ConvergenceTrace>> {
    (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i);
            prepared.run(iterations, x0, &mut rng)
        })
        .collect()
}

/// Runs the full experiment: builds the matrix, resolves each method, runs
/// `trials` seeded trials per method and reduces them to mean traces.
pub fn monte_carlo(spec: &ExperimentSpec) -> Result<Vec<MethodRun>> {
    monte_carlo_with_x0(spec, None)
}

/// `monte_carlo` with a shared explicit starting point for every trial.
pub fn monte_carlo_with_x0(spec: &ExperimentSpec, x0: Option<&[f64]>) -> Result<Vec<MethodRun>> {
    if spec.trials < 1 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    let recipe = MatrixRecipe::parse(&spec.matrix)?;
    let mut setup = setup_rng(spec.seed);
    let (a, decomp) = recipe.build(&mut setup)?;
    let n = a.dim();
    let b: Vec<f64> = (0..n).map(|_| setup.sample(StandardNormal)).collect();
    let problem = QuadraticProblem::new(a, b)?;

    let mut runs = Vec::with_capacity(spec.methods.len());
    for method in &spec.methods {
        let prepared = prepare_method(&problem, &decomp, method, &mut setup)?;
        let traces = monte_carlo_trials(&prepared, spec.trials, spec.iterations, spec.seed, x0)?;
        runs.push(MethodRun {
            method: method.clone(),
            trace: mean_trace_from_trials(&traces),
        });
    }
    Ok(runs)
}

// ---------------------------------------------------------------------------
// CSV output

pub fn csv_file_name(prefix: &str, label: &str, k: usize, tau: usize) -> String {
    format!("{prefix}_{label}_k{k}_tau{tau}.csv")
}

pub fn mean_trace_csv(trace: &MeanTrace, method: &str, k: usize, tau: usize, seed: u64) -> String {
    let mut out = String::from("iteration,mean_rel_error,stderr,trials,method,k,tau,seed\n");
    for (t, (m, s)) in trace.mean.iter().zip(&trace.stderr).enumerate() {
        out.push_str(&format!(
            "{t},{m},{s},{trials},{method},{k},{tau},{seed}\n",
            trials = trace.trials
        ));
    }
    out
}

/// Writes one CSV per method run; returns the paths in method order.
pub fn write_experiment_csvs(
    out_dir: &Path,
    spec: &ExperimentSpec,
    runs: &[MethodRun],
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir)?;
    let mut paths = Vec::with_capacity(runs.len());
    for run in runs {
        let name = csv_file_name(
            spec.prefix(),
            &run.method.label(),
            run.method.k(),
            run.method.tau(),
        );
        let path = out_dir.join(name);
        let mut file = std::fs::File::create(&path)?;
        file.write_all(
            mean_trace_csv(
                &run.trace,
                &run.method.label(),
                run.method.k(),
                run.method.tau(),
                spec.seed,
            )
            .as_bytes(),
        )?;
        paths.push(path);
    }
    Ok(paths)
}

// ---------------------------------------------------------------------------
// presets

pub const PRESET_NAMES: &[&str] = &[
    "phase-transition",
    "three-clusters",
    "minibatch",
    "expdecay",
    "inexact",
    "largescale",
    "largescale-clustered",
];

/// 30-dimensional matrix with two 15-eigenvalue clusters (5, 5+Δ) and
/// (θ, θ+Δ); augmented coordinate descent across the given k values.
pub fn phase_transition_spec(
    theta: f64,
    delta: f64,
    ks: &[usize],
    trials: usize,
    seed: u64,
) -> ExperimentSpec {
    ExperimentSpec {
        name: "phase-transition".into(),
        matrix: format!(
            "clustered:5,{},15;{theta},{},15",
            5.0 + delta,
            theta + delta
        ),
        methods: ks.iter().map(|&k| MethodSpec::sscd_optimal(k)).collect(),
        trials,
        iterations: 600,
        seed,
        output_prefix: String::new(),
    }
}

pub fn three_cluster_spec(theta: f64, delta: f64, trials: usize, seed: u64) -> ExperimentSpec {
    ExperimentSpec {
        name: "three-clusters".into(),
        matrix: format!(
            "clustered:10,{},10;{theta},{},10;{},{},10",
            10.0 + delta,
            theta + delta,
            2.0 * theta,
            2.0 * theta + delta
        ),
        methods: [0usize, 5, 10, 15, 20, 25, 29]
            .iter()
            .map(|&k| MethodSpec::sscd_optimal(k))
            .collect(),
        trials,
        iterations: 1500,
        seed,
        output_prefix: String::new(),
    }
}

/// Mini-batch augmented descent on the uniform [1, 60] spectrum, n = 30, with
/// the optimal stepsize ω(τ) = 1/ξ(τ) per method.
pub fn minibatch_spec(taus: &[usize], ks: &[usize], trials: usize, seed: u64) -> ExperimentSpec {
    let mut methods = Vec::new();
    for &tau in taus {
        for &k in ks {
            methods.push(MethodSpec::Sd {
                distribution: DistributionSpec::Sscd {
                    k,
                    alpha: None,
                    betas: None,
                },
                tau,
                omega: None,
            });
        }
    }
    ExperimentSpec {
        name: "minibatch".into(),
        matrix: "uniform:1,60,30".into(),
        methods,
        trials,
        iterations: 400,
        seed,
        output_prefix: String::new(),
    }
}

/// Doubling spectrum 2⁰…2⁹ (n = 10), k = 0…9.
pub fn expdecay_spec(trials: usize, seed: u64) -> ExperimentSpec {
    ExperimentSpec {
        name: "expdecay".into(),
        matrix: "expdecay:0.5,10".into(),
        methods: (0..10).map(MethodSpec::sscd_optimal).collect(),
        trials,
        iterations: 3000,
        seed,
        output_prefix: String::new(),
    }
}

/// Conjugate descent with ε-approximate directions, n = 10, per ε.
pub fn inexact_spec(eps_list: &[f64], trials: usize, seed: u64) -> ExperimentSpec {
    ExperimentSpec {
        name: "inexact".into(),
        matrix: "uniform:1,100,10".into(),
        methods: eps_list
            .iter()
            .map(|&eps| MethodSpec::Iscond { eps })
            .collect(),
        trials,
        iterations: 600,
        seed,
        output_prefix: String::new(),
    }
}

/// Shape-preserving stand-in for the huge sparse experiment, at n = 200
/// dense: uniform [1, 100] spectrum with k = 0 versus k = n/10, or two
/// clusters [1, 2] (10 eigenvalues) and [100, 200] with k = 0 versus k = 10.
pub fn largescale_spec(clustered: bool, trials: usize, seed: u64) -> ExperimentSpec {
    if clustered {
        ExperimentSpec {
            name: "largescale-clustered".into(),
            matrix: "clustered:1,2,10;100,200,190".into(),
            methods: vec![MethodSpec::sscd_optimal(0), MethodSpec::sscd_optimal(10)],
            trials,
            iterations: 6000,
            seed,
            output_prefix: String::new(),
        }
    } else {
        ExperimentSpec {
            name: "largescale".into(),
            matrix: "uniform:1,100,200".into(),
            methods: vec![MethodSpec::sscd_optimal(0), MethodSpec::sscd_optimal(20)],
            trials,
            iterations: 12000,
            seed,
            output_prefix: String::new(),
        }
    }
}

/// Builds a preset by name with optional trial/iteration overrides.
pub fn preset_spec(
    name: &str,
    trials: Option<usize>,
    iterations: Option<usize>,
    seed: u64,
) -> Result<ExperimentSpec> {
    let mut spec = match name {
        "phase-transition" => {
            phase_transition_spec(100.0, 1.0, &[0, 6, 12, 18, 24, 29], 2000, seed)
        }
        "three-clusters" => three_cluster_spec(100.0, 1.0, 1000, seed),
        "minibatch" => minibatch_spec(&[1, 2, 4, 8], &[0, 6, 12, 18, 24, 29], 1000, seed),
        "expdecay" => expdecay_spec(2000, seed),
        "inexact" => inexact_spec(&[0.0, 1.0 / 54.0, 1.0 / 27.0, 0.1], 2000, seed),
        "largescale" => largescale_spec(false, 50, seed),
        "largescale-clustered" => largescale_spec(true, 50, seed),
        other => {
            return Err(Error::InvalidParameter(format!(
                "unknown preset {other:?}; available: {}",
                PRESET_NAMES.join(", ")
            )))
        }
    };
    if let Some(t) = trials {
        spec.trials = t;
    }
    if let Some(i) = iterations {
        spec.iterations = i;
    }
    Ok(spec)
}

/// Runs the two-cluster preset and returns one mean trace per k.
pub fn preset_phase_transition(
    theta: f64,
    delta: f64,
    ks: &[usize],
    trials: usize,
    seed: u64,
) -> Result<Vec<MethodRun>> {
    monte_carlo(&phase_transition_spec(theta, delta, ks, trials, seed))
}

pub fn preset_minibatch(
    taus: &[usize],
    ks: &[usize],
    trials: usize,
    seed: u64,
) -> Result<Vec<MethodRun>> {
    monte_carlo(&minibatch_spec(taus, ks, trials, seed))
}

pub fn preset_expdecay(trials: usize, seed: u64) -> Result<Vec<MethodRun>> {
    monte_carlo(&expdecay_spec(trials, seed))
}

pub fn preset_inexact(eps_list: &[f64], trials: usize, seed: u64) -> Result<Vec<MethodRun>> {
    for &eps in eps_list {
        if !(0.0..1.0 / 9.0).contains(&eps) {
            return Err(Error::InvalidParameter(format!(
                "eps = {eps} out of range for n = 10: need 0 <= eps < 1/9"
            )));
        }
    }
    monte_carlo(&inexact_spec(eps_list, trials, seed))
}

// ---------------------------------------------------------------------------
// lower-bound verifier

/// Outcome of the lower-bound check for one probability vector.
#[derive(Clone, Debug)]
pub struct LowerBoundCase {
    pub label: String,
    /// min over t of `mean[t]/floor[t] − (1 − 4·relSE[t])`; nonnegative = pass.
    pub margin: f64,
    pub pass: bool,
}

#[derive(Clone, Debug)]
pub struct LowerBoundReport {
    pub pass: bool,
    pub min_margin: f64,
    pub cases: Vec<LowerBoundCase>,
}

/// Monte Carlo check that no probability choice can beat the (1 − 1/T)^{2t}
/// floor on the adversarial matrix: starts every trial at
/// x_* + A^{-1/2}·u₁(W(p)) and requires the empirical mean to stay above the
/// floor minus four standard errors.
pub fn verify_lower_bound(
    n: usize,
    t_param: f64,
    t_max: usize,
    trials: usize,
    seed: u64,
) -> Result<LowerBoundReport> {
    let a = theory::construct_bad_matrix_upper(n, t_param)?;
    let mut setup = setup_rng(seed);
    let b: Vec<f64> = (0..n).map(|_| setup.sample(StandardNormal)).collect();
    let problem = QuadraticProblem::new(a.clone(), b)?;
    let a_decomp = jacobi_eigendecompose(&a)?;
    let inv_half = matrix_power(&a_decomp, -0.5)?;

    let mut probability_choices: Vec<(String, Vec<f64>)> = vec![
        (
            "uniform".into(),
            crate::distributions::uniform_probabilities(n),
        ),
        (
            "diagonal".into(),
            crate::distributions::diagonal_probabilities(&a),
        ),
    ];
    for i in 0..10 {
        let raw: Vec<f64> = (0..n).map(|_| setup.random_range(0.02..1.0)).collect();
        let total: f64 = raw.iter().sum();
        probability_choices.push((
            format!("random-{i}"),
            raw.iter().map(|x| x / total).collect(),
        ));
    }

    let floor_base = 1.0 - 1.0 / t_param;
    let mut cases = Vec::new();
    for (label, p) in probability_choices {
        let dist = crate::distributions::coordinate_distribution(&a, &p)?;
        let w = theory::w_matrix(&a, &dist)?;
        let w_decomp = jacobi_eigendecompose(&w)?;
        let u1 = w_decomp.eigenvector(0);
        let mut x0 = problem.x_star().to_vec();
        let shift = inv_half.matvec(&u1);
        for (x, s) in x0.iter_mut().zip(&shift) {
            *x += s;
        }

        let prepared = Prepared::Sd(PreparedSd::new(&problem, &dist, 1.0, 1)?);
        let traces = monte_carlo_trials(&prepared, trials, t_max, seed, Some(&x0))?;
        let trace = mean_trace_from_trials(&traces);

        let mut margin = f64::INFINITY;
        for t in 0..=t_max {
            let floor = floor_base.powi(2 * t as i32);
            let rel_se = if trace.mean[t] > 0.0 {
                trace.stderr[t] / trace.mean[t]
            } else {
                0.0
            };
            let m = trace.mean[t] / floor - (1.0 - 4.0 * rel_se);
            margin = margin.min(m);
        }
        cases.push(LowerBoundCase {
            label,
            margin,
            pass: margin >= 0.0,
        });
    }
    let pass = cases.iter().all(|c| c.pass);
    let min_margin = cases.iter().map(|c| c.margin).fold(f64::INFINITY, f64::min);
    Ok(LowerBoundReport {
        pass,
        min_margin,
        cases,
    })
}

#[cfg(test)]
mod tests;
