//! The iterative methods.
//!
//! One engine drives all stochastic descent runs: directions and their
//! A-images are tabulated once, then each step costs O(n) — sample an index,
//! project, update the residual. Error recording tracks ‖x_t − x_*‖²_A via
//! the maintained residual, so a full trace never needs a matrix-vector
//! product per iteration.
//!
//! Runners are deterministic given the RNG handle; independent Monte Carlo
//! trials own private RNG streams, so concurrent execution is
//! schedule-independent.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::distributions::{self, sample_cumulative, uniform_cumulative, DirectionDistribution};
use crate::error::{Error, Result};
use crate::linalg::{
    self, a_norm_sq, axpy, dot, sub, ConjugateSystem, SpectralDecomposition, SymmetricMatrix,
};

// ---------------------------------------------------------------------------
// problem and configuration

/// min ½xᵀAx − bᵀx with A symmetric positive definite; the solution
/// x_* = A⁻¹b is computed at construction.
#[derive(Clone, Debug)]
pub struct QuadraticProblem {
    a: SymmetricMatrix,
    b: Vec<f64>,
    x_star: Vec<f64>,
    /// b − A·x_*, kept so error recording can reconstruct A(x − x_*) from the
    /// maintained residual without amplifying the solve error.
    defect: Vec<f64>,
}

impl QuadraticProblem {
    pub fn new(a: SymmetricMatrix, b: Vec<f64>) -> Result<Self> {
        let n = a.dim();
        if b.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: b.len(),
            });
        }
        let x_star = cholesky_solve(&a, &b)?;
        let ax = a.matvec(&x_star);
        let defect: Vec<f64> = b.iter().zip(&ax).map(|(bi, axi)| bi - axi).collect();
        let b_scale = b.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let worst = defect.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if worst > 1e-8 * (1.0 + b_scale) {
            return Err(Error::Domain(format!(
                "solve residual {worst:e} exceeds 1e-8·(1 + ‖b‖): matrix too ill-conditioned"
            )));
        }
        Ok(QuadraticProblem {
            a,
            b,
            x_star,
            defect,
        })
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    pub fn a(&self) -> &SymmetricMatrix {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn x_star(&self) -> &[f64] {
        &self.x_star
    }

    /// ‖x − x_*‖²_A.
    pub fn error_a_norm_sq(&self, x: &[f64]) -> Result<f64> {
        a_norm_sq(&self.a, &sub(x, &self.x_star))
    }
}

fn cholesky_solve(a: &SymmetricMatrix, b: &[f64]) -> Result<Vec<f64>> {
    let n = a.dim();
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = a.entry(i, j);
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if s <= 0.0 {
                    return Err(Error::NotPositiveDefinite);
                }
                l[i * n + i] = s.sqrt();
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    let mut y = vec![0.0; n];
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l[i * n + k] * y[k];
        }
        y[i] = s / l[i * n + i];
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in (i + 1)..n {
            s -= l[k * n + i] * x[k];
        }
        x[i] = s / l[i * n + i];
    }
    Ok(x)
}

/// Stepsize, mini-batch size, iteration budget and the starting point.
/// `x0 = None` draws the default start x_* + g/‖g‖_A (unit initial error) from
/// the run's RNG, so traces are comparable across runs.
#[derive(Clone, Debug)]
pub struct SolverConfig {
    pub omega: f64,
    pub tau: usize,
    pub iterations: usize,
    pub x0: Option<Vec<f64>>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            omega: 1.0,
            tau: 1,
            iterations: 100,
            x0: None,
        }
    }
}

impl SolverConfig {
    pub fn with_iterations(iterations: usize) -> Self {
        SolverConfig {
            iterations,
            ..Default::default()
        }
    }
}

/// Per-iteration squared A-norm errors (indexed 0..=iterations) plus the run's
/// endpoints.
#[derive(Clone, Debug)]
pub struct ConvergenceTrace {
    pub errors: Vec<f64>,
    pub initial: Vec<f64>,
    pub final_iterate: Vec<f64>,
}

pub(crate) fn default_x0<R: Rng + ?Sized>(problem: &QuadraticProblem, rng: &mut R) -> Vec<f64> {
    let n = problem.dim();
    loop {
        let g: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let norm_sq = dot(&g, &problem.a.matvec(&g));
        if norm_sq > 0.0 {
            let inv = 1.0 / norm_sq.sqrt();
            let mut x0 = problem.x_star.clone();
            axpy(&mut x0, inv, &g);
            return x0;
        }
    }
}

fn resolve_x0<R: Rng + ?Sized>(
    problem: &QuadraticProblem,
    x0: Option<&[f64]>,
    rng: &mut R,
) -> Result<Vec<f64>> {
    match x0 {
        Some(v) => {
            if v.len() != problem.dim() {
                return Err(Error::DimensionMismatch {
                    expected: problem.dim(),
                    found: v.len(),
                });
            }
            Ok(v.to_vec())
        }
        None => Ok(default_x0(problem, rng)),
    }
}

#[inline]
fn recorded_error(x: &[f64], r: &[f64], x_star: &[f64], defect: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..x.len() {
        s += (x[i] - x_star[i]) * (r[i] + defect[i]);
    }
    s.max(0.0)
}

// ---------------------------------------------------------------------------
// single steps

/// One stochastic descent step: x − ω·(sᵀ(Ax − b))/(sᵀAs)·s.
pub fn sd_step(problem: &QuadraticProblem, x: &[f64], s: &[f64], omega: f64) -> Result<Vec<f64>> {
    let n = problem.dim();
    if x.len() != n || s.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: x.len().max(s.len()),
        });
    }
    let a_s = problem.a.matvec(s);
    let sas = dot(s, &a_s);
    if sas <= 1e-14 {
        return Err(Error::DegenerateDirection { value: sas });
    }
    let mut r = problem.a.matvec(x);
    axpy(&mut r, -1.0, &problem.b);
    let c = omega * dot(s, &r) / sas;
    let mut next = x.to_vec();
    axpy(&mut next, -c, s);
    Ok(next)
}

/// One coordinate descent step: x − (A_{i:}x − bᵢ)/Aᵢᵢ · eᵢ.
pub fn rcd_step(problem: &QuadraticProblem, x: &[f64], i: usize) -> Vec<f64> {
    let mut next = x.to_vec();
    next[i] -= (dot(problem.a.row(i), x) - problem.b[i]) / problem.a.entry(i, i);
    next
}

/// One spectral descent step along an eigenpair: x − (uᵀx − uᵀb/λ)·u.
pub fn ssd_step(x: &[f64], u: &[f64], lambda: f64, b: &[f64]) -> Result<Vec<f64>> {
    if lambda <= 0.0 {
        return Err(Error::Domain(format!(
            "eigenvalue must be positive, got {lambda}"
        )));
    }
    if (linalg::norm2(u) - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidParameter(
            "eigenvector must have unit Euclidean norm".into(),
        ));
    }
    let c = dot(u, x) - dot(u, b) / lambda;
    let mut next = x.to_vec();
    axpy(&mut next, -c, u);
    Ok(next)
}

// ---------------------------------------------------------------------------
// prepared engines

/// Direction table shared by all trials of a run: the directions, their
/// A-images, energies sᵀAs, and the cumulative sampling table.
pub(crate) struct PreparedSd<'a> {
    problem: &'a QuadraticProblem,
    dirs: Vec<Vec<f64>>,
    a_dirs: Vec<Vec<f64>>,
    quad: Vec<f64>,
    cum: Vec<f64>,
    pub(crate) omega: f64,
    pub(crate) tau: usize,
}

impl<'a> PreparedSd<'a> {
    pub(crate) fn new(
        problem: &'a QuadraticProblem,
        dist: &DirectionDistribution,
        omega: f64,
        tau: usize,
    ) -> Result<Self> {
        let n = problem.dim();
        if dist.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: dist.dim(),
            });
        }
        if tau < 1 {
            return Err(Error::InvalidParameter("tau must be >= 1".into()));
        }
        let mut dirs = Vec::with_capacity(dist.len());
        let mut a_dirs = Vec::with_capacity(dist.len());
        let mut quad = Vec::with_capacity(dist.len());
        for j in 0..dist.len() {
            let s = dist.direction(j).to_vec();
            let a_s = problem.a.matvec(&s);
            let sas = dot(&s, &a_s);
            if sas <= 1e-14 {
                return Err(Error::DegenerateDirection { value: sas });
            }
            dirs.push(s);
            a_dirs.push(a_s);
            quad.push(sas);
        }
        let mut cum = Vec::with_capacity(dist.len());
        let mut acc = 0.0;
        for j in 0..dist.len() {
            acc += dist.probability(j);
            cum.push(acc);
        }
        Ok(PreparedSd {
            problem,
            dirs,
            a_dirs,
            quad,
            cum,
            omega,
            tau,
        })
    }

    pub(crate) fn run<R: Rng + ?Sized>(
        &self,
        iterations: usize,
        x0: Option<&[f64]>,
        rng: &mut R,
    ) -> Result<ConvergenceTrace> {
        let problem = self.problem;
        let initial = resolve_x0(problem, x0, rng)?;
        let mut x = initial.clone();
        let mut r = problem.a.matvec(&x);
        axpy(&mut r, -1.0, &problem.b);

        let mut errors = Vec::with_capacity(iterations + 1);
        errors.push(a_norm_sq(&problem.a, &sub(&x, &problem.x_star))?);

        let scale = self.omega / self.tau as f64;
        let mut picked = vec![0usize; self.tau];
        let mut coeff = vec![0.0f64; self.tau];
        for _ in 0..iterations {
            // all tau sub-steps branch from the common iterate, so the
            // coefficients are read from r before any update lands
            for i in 0..self.tau {
                let u: f64 = rng.random();
                let j = sample_cumulative(&self.cum, u);
                picked[i] = j;
                coeff[i] = dot(&self.dirs[j], &r) / self.quad[j];
            }
            for i in 0..self.tau {
                let j = picked[i];
                let f = scale * coeff[i];
                axpy(&mut x, -f, &self.dirs[j]);
                axpy(&mut r, -f, &self.a_dirs[j]);
            }
            errors.push(recorded_error(&x, &r, &problem.x_star, &problem.defect));
        }
        Ok(ConvergenceTrace {
            errors,
            initial,
            final_iterate: x,
        })
    }
}

fn ensure_proper(a: &SymmetricMatrix, dist: &DirectionDistribution) -> Result<()> {
    let gap = distributions::properness_gap(a, dist)?;
    if gap <= 1e-12 {
        return Err(Error::ImproperDistribution { lambda_min: gap });
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// runners

/// Stochastic descent: sample s ~ D, project along it with stepsize ω ∈ (0, 2).
/// Uses `config.omega`, `config.iterations` and `config.x0`; `config.tau`
/// must be 1.
pub fn run_sd<R: Rng + ?Sized>(
    problem: &QuadraticProblem,
    dist: &DirectionDistribution,
    config: &SolverConfig,
    rng: &mut R,
) -> Result<ConvergenceTrace> {
    if config.tau != 1 {
        return Err(Error::InvalidParameter(
            "run_sd expects tau = 1; use run_minibatch_sd".into(),
        ));
    }
    if !(config.omega > 0.0 && config.omega < 2.0) {
        return Err(Error::InvalidParameter(format!(
            "stepsize omega = {} outside (0, 2)",
            config.omega
        )));
    }
    ensure_proper(&problem.a, dist)?;
    PreparedSd::new(problem, dist, config.omega, 1)?.run(
        config.iterations,
        config.x0.as_deref(),
        rng,
    )
}

/// Mini-batch stochastic descent: τ independent one-step iterates from the
/// common x_t are averaged. The τ samples are drawn sequentially from the one
/// stream, so τ = 1 reproduces `run_sd` exactly. Requires 0 < ω < 2/ξ(τ)
/// with ξ(τ) = 1/τ + (1 − 1/τ)·λ_max(W).
pub fn run_minibatch_sd<R: Rng + ?Sized>(
    problem: &QuadraticProblem,
    dist: &DirectionDistribution,
    config: &SolverConfig,
    rng: &mut R,
) -> Result<ConvergenceTrace> {
    ensure_proper(&problem.a, dist)?;
    let w = crate::theory::w_matrix(&problem.a, dist)?;
    let lambda_max = linalg::jacobi_eigendecompose(&w)?.max_eigenvalue();
    let t = config.tau as f64;
    let xi = 1.0 / t + (1.0 - 1.0 / t) * lambda_max;
    if !(config.omega > 0.0 && config.omega < 2.0 / xi) {
        return Err(Error::InvalidParameter(format!(
            "stepsize omega = {} outside (0, 2/xi) with xi = {xi}",
            config.omega
        )));
    }
    PreparedSd::new(problem, dist, config.omega, config.tau)?.run(
        config.iterations,
        config.x0.as_deref(),
        rng,
    )
}

// ---------------------------------------------------------------------------
// conjugate and inexact runners

pub(crate) struct PreparedIscond<'a> {
    problem: &'a QuadraticProblem,
    dirs: Vec<Vec<f64>>,
    a_dirs: Vec<Vec<f64>>,
    cum: Vec<f64>,
}

impl<'a> PreparedIscond<'a> {
    pub(crate) fn new(problem: &'a QuadraticProblem, system: &ConjugateSystem) -> Result<Self> {
        let n = problem.dim();
        if system.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: system.dim(),
            });
        }
        let dirs: Vec<Vec<f64>> = (0..n).map(|j| system.direction(j)).collect();
        let a_dirs: Vec<Vec<f64>> = dirs.iter().map(|v| problem.a.matvec(v)).collect();
        Ok(PreparedIscond {
            problem,
            dirs,
            a_dirs,
            cum: uniform_cumulative(n),
        })
    }

    pub(crate) fn run<R: Rng + ?Sized>(
        &self,
        iterations: usize,
        x0: Option<&[f64]>,
        rng: &mut R,
    ) -> Result<ConvergenceTrace> {
        let problem = self.problem;
        let initial = resolve_x0(problem, x0, rng)?;
        let mut x = initial.clone();
        let mut r = problem.a.matvec(&x);
        axpy(&mut r, -1.0, &problem.b);
        let mut errors = Vec::with_capacity(iterations + 1);
        errors.push(a_norm_sq(&problem.a, &sub(&x, &problem.x_star))?);
        for _ in 0..iterations {
            let u: f64 = rng.random();
            let j = sample_cumulative(&self.cum, u);
            // vᵀAv = 1 by the system invariant, so the step skips the division
            let c = dot(&self.dirs[j], &r);
            axpy(&mut x, -c, &self.dirs[j]);
            axpy(&mut r, -c, &self.a_dirs[j]);
            errors.push(recorded_error(&x, &r, &problem.x_star, &problem.defect));
        }
        Ok(ConvergenceTrace {
            errors,
            initial,
            final_iterate: x,
        })
    }
}

/// Conjugate descent with (possibly ε-approximate) directions, sampled
/// uniformly: x_{t+1} = x_t − vᵢᵀ(Ax_t − b)·vᵢ. Stepsize is fixed at 1;
/// `config.omega` and `config.tau` are not consulted.
pub fn run_iscond<R: Rng + ?Sized>(
    problem: &QuadraticProblem,
    system: &ConjugateSystem,
    config: &SolverConfig,
    rng: &mut R,
) -> Result<ConvergenceTrace> {
    PreparedIscond::new(problem, system)?.run(config.iterations, config.x0.as_deref(), rng)
}

/// An approximate eigenpair (w, λ) with Aw = λw + ε.
#[derive(Clone, Debug)]
pub struct InexactEigenpair {
    pub vector: Vec<f64>,
    pub value: f64,
}

/// The λ minimizing ‖Aw − λw‖₂ for a unit vector w: the Rayleigh quotient
/// wᵀAw. The resulting residual is orthogonal to w.
pub fn optimal_inexact_eigenvalue(a: &SymmetricMatrix, w: &[f64]) -> Result<f64> {
    if w.len() != a.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: w.len(),
        });
    }
    if (linalg::norm2(w) - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidParameter(
            "w must have unit Euclidean norm".into(),
        ));
    }
    Ok(dot(w, &a.matvec(w)))
}

/// Perturbs the eigenvectors of `decomp` entrywise by `magnitude`-scaled
/// Gaussian noise, re-orthonormalizes, and pairs each vector with its
/// Rayleigh-quotient eigenvalue.
pub fn perturbed_eigenpairs<R: Rng + ?Sized>(
    a: &SymmetricMatrix,
    decomp: &SpectralDecomposition,
    magnitude: f64,
    rng: &mut R,
) -> Result<Vec<InexactEigenpair>> {
    let n = a.dim();
    if decomp.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: decomp.dim(),
        });
    }
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut v = decomp.eigenvector(i);
        for x in v.iter_mut() {
            *x += magnitude * rng.sample::<f64, _>(StandardNormal);
        }
        cols.push(v);
    }
    // plain Gram-Schmidt; perturbed eigenvectors stay far from dependence
    for j in 0..n {
        for _ in 0..2 {
            for i in 0..j {
                let (head, tail) = cols.split_at_mut(j);
                let c = dot(&head[i], &tail[0]);
                axpy(&mut tail[0], -c, &head[i]);
            }
        }
        let norm = linalg::norm2(&cols[j]);
        if norm < 1e-8 {
            return Err(Error::DegenerateBasis { index: j, norm });
        }
        for x in cols[j].iter_mut() {
            *x /= norm;
        }
    }
    cols.into_iter()
        .map(|v| {
            let value = dot(&v, &a.matvec(&v));
            Ok(InexactEigenpair { vector: v, value })
        })
        .collect()
}

pub(crate) struct PreparedIssd<'a> {
    problem: &'a QuadraticProblem,
    dirs: Vec<Vec<f64>>,
    a_dirs: Vec<Vec<f64>>,
    wb_over_lambda: Vec<f64>,
    cum: Vec<f64>,
}

impl<'a> PreparedIssd<'a> {
    pub(crate) fn new(problem: &'a QuadraticProblem, pairs: &[InexactEigenpair]) -> Result<Self> {
        let n = problem.dim();
        if pairs.is_empty() {
            return Err(Error::InvalidParameter("no eigenpairs supplied".into()));
        }
        let mut dirs = Vec::with_capacity(pairs.len());
        let mut a_dirs = Vec::with_capacity(pairs.len());
        let mut wb_over_lambda = Vec::with_capacity(pairs.len());
        for (i, pair) in pairs.iter().enumerate() {
            if pair.vector.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: pair.vector.len(),
                });
            }
            if pair.value <= 0.0 {
                return Err(Error::Domain(format!(
                    "inexact eigenvalue {i} must be positive, got {}",
                    pair.value
                )));
            }
            if (linalg::norm2(&pair.vector) - 1.0).abs() > 1e-10 {
                return Err(Error::InvalidParameter(format!(
                    "inexact eigenvector {i} must have unit Euclidean norm"
                )));
            }
            wb_over_lambda.push(dot(&pair.vector, &problem.b) / pair.value);
            a_dirs.push(problem.a.matvec(&pair.vector));
            dirs.push(pair.vector.clone());
        }
        Ok(PreparedIssd {
            problem,
            cum: uniform_cumulative(pairs.len()),
            dirs,
            a_dirs,
            wb_over_lambda,
        })
    }

    pub(crate) fn run<R: Rng + ?Sized>(
        &self,
        iterations: usize,
        x0: Option<&[f64]>,
        rng: &mut R,
    ) -> Result<ConvergenceTrace> {
        let problem = self.problem;
        let initial = resolve_x0(problem, x0, rng)?;
        let mut x = initial.clone();
        let mut r = problem.a.matvec(&x);
        axpy(&mut r, -1.0, &problem.b);
        let mut errors = Vec::with_capacity(iterations + 1);
        errors.push(a_norm_sq(&problem.a, &sub(&x, &problem.x_star))?);
        for _ in 0..iterations {
            let u: f64 = rng.random();
            let j = sample_cumulative(&self.cum, u);
            let c = dot(&self.dirs[j], &x) - self.wb_over_lambda[j];
            axpy(&mut x, -c, &self.dirs[j]);
            axpy(&mut r, -c, &self.a_dirs[j]);
            errors.push(recorded_error(&x, &r, &problem.x_star, &problem.defect));
        }
        Ok(ConvergenceTrace {
            errors,
            initial,
            final_iterate: x,
        })
    }
}

/// Spectral descent run verbatim on inexact eigenpairs, sampled uniformly:
/// x_{t+1} = x_t − (wᵢᵀx_t − wᵢᵀb/λᵢ)·wᵢ. Converges only to a neighborhood
/// of x_* whose size is certified by the theory module. Stepsize fixed at 1.
pub fn run_issd<R: Rng + ?Sized>(
    problem: &QuadraticProblem,
    pairs: &[InexactEigenpair],
    config: &SolverConfig,
    rng: &mut R,
) -> Result<ConvergenceTrace> {
    PreparedIssd::new(problem, pairs)?.run(config.iterations, config.x0.as_deref(), rng)
}

/// Assembles the solution directly from a conjugate system: x̂ = S·Sᵀb.
/// Exact for ε = 0; for ε-approximate systems the relative A-norm error is
/// bounded by ε(n−1)(1 + ε(n−1))/(1 − ε(n−1)).
pub fn direct_conjugate_solve(system: &ConjugateSystem, b: &[f64]) -> Result<Vec<f64>> {
    let n = system.dim();
    if b.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: b.len(),
        });
    }
    let s = system.directions();
    let st_b: Vec<f64> = (0..n).map(|j| dot(&s.col(j), b)).collect();
    Ok(s.matvec(&st_b))
}
