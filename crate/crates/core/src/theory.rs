//! Exact convergence rates and the bounds behind them.
//!
//! The central object is W = E[A^{1/2}HA^{1/2}] with H = ssᵀ/(sᵀAs): its
//! extreme eigenvalues control the linear rate of every stochastic descent
//! run. This module computes W and its rates, the closed-form rates of the
//! spectral-augmented family, mini-batch rate algebra, and the constructions
//! that show importance sampling and "optimal" probabilities cannot rescue
//! coordinate descent on adversarial matrices.

use crate::distributions::{self, DirectionDistribution};
use crate::error::{Error, Result};
use crate::linalg::{
    self, build_rotation_embedding, jacobi_eigendecompose, matrix_from_spectrum, matrix_power, Mat,
    SymmetricMatrix,
};
use crate::solvers::{InexactEigenpair, QuadraticProblem};

/// Per-step contraction factors and the iteration-complexity constant of a
/// stochastic descent run, from the extreme eigenvalues of W.
#[derive(Clone, Debug)]
pub struct RateReport {
    pub lambda_min_w: f64,
    pub lambda_max_w: f64,
    /// 1 − ω(2−ω)·λ_max(W): no run contracts faster than this in expectation.
    pub contraction_lower: f64,
    /// 1 − ω(2−ω)·λ_min(W): no run contracts slower than this in expectation.
    pub contraction_upper: f64,
    /// 1/λ_min(W), the iteration count per digit of accuracy up to a log factor.
    pub iteration_complexity: f64,
}

/// `E[H]` = Σ pᵢ sᵢsᵢᵀ/(sᵢᵀAsᵢ).
pub fn expected_h(a: &SymmetricMatrix, dist: &DirectionDistribution) -> Result<SymmetricMatrix> {
    let n = a.dim();
    if dist.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: dist.dim(),
        });
    }
    let mut acc = Mat::zeros(n, n);
    for j in 0..dist.len() {
        let s = dist.direction(j);
        let sas = linalg::dot(s, &a.matvec(s));
        if sas <= 0.0 {
            return Err(Error::DegenerateDirection { value: sas });
        }
        let w = dist.probability(j) / sas;
        for r in 0..n {
            if s[r] == 0.0 {
                continue;
            }
            for c in r..n {
                let v = acc.get(r, c) + w * s[r] * s[c];
                acc.set(r, c, v);
            }
        }
    }
    for r in 0..n {
        for c in (r + 1)..n {
            let v = acc.get(r, c);
            acc.set(c, r, v);
        }
    }
    SymmetricMatrix::from_mat(acc)
}

/// W = A^{1/2} `E[H]` A^{1/2}. Has unit trace for every distribution.
pub fn w_matrix(a: &SymmetricMatrix, dist: &DirectionDistribution) -> Result<SymmetricMatrix> {
    let decomp = jacobi_eigendecompose(a)?;
    if !decomp.is_positive_definite() {
        return Err(Error::NotPositiveDefinite);
    }
    let half = matrix_power(&decomp, 0.5)?;
    let eh = expected_h(a, dist)?;
    let prod = half.mat().matmul(&eh.mat().matmul(half.mat()));
    SymmetricMatrix::symmetrized(prod)
}

/// Eigensolved rate report for stochastic descent with stepsize `omega`.
pub fn rate_report(
    a: &SymmetricMatrix,
    dist: &DirectionDistribution,
    omega: f64,
) -> Result<RateReport> {
    if !(omega > 0.0 && omega < 2.0) {
        return Err(Error::InvalidParameter(format!(
            "stepsize omega = {omega} outside (0, 2)"
        )));
    }
    let eh = expected_h(a, dist)?;
    let eh_min = jacobi_eigendecompose(&eh)?.min_eigenvalue();
    if eh_min <= 1e-12 {
        return Err(Error::ImproperDistribution { lambda_min: eh_min });
    }
    let w = w_matrix(a, dist)?;
    let wd = jacobi_eigendecompose(&w)?;
    let (lmin, lmax) = (wd.min_eigenvalue(), wd.max_eigenvalue());
    let damp = omega * (2.0 - omega);
    Ok(RateReport {
        lambda_min_w: lmin,
        lambda_max_w: lmax,
        contraction_lower: 1.0 - damp * lmax,
        contraction_upper: 1.0 - damp * lmin,
        iteration_complexity: 1.0 / lmin,
    })
}

// ---------------------------------------------------------------------------
// closed-form rates of the spectral-augmented family

fn check_spectrum_and_k(eigenvalues: &[f64], k: usize) -> Result<()> {
    if eigenvalues.is_empty() {
        return Err(Error::InvalidParameter("empty spectrum".into()));
    }
    if eigenvalues.iter().any(|&l| l <= 0.0) {
        return Err(Error::InvalidParameter(
            "eigenvalues must be positive".into(),
        ));
    }
    if eigenvalues.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidParameter(
            "eigenvalues must be in ascending order".into(),
        ));
    }
    if k >= eigenvalues.len() {
        return Err(Error::InvalidParameter(format!(
            "k = {k} out of range: need 0 <= k <= n-1 = {}",
            eigenvalues.len() - 1
        )));
    }
    Ok(())
}

/// λ_{k+1}/C_k, the per-step rate constant of the optimally-augmented
/// coordinate distribution with k extra eigenvector directions.
pub fn sscd_rate(eigenvalues: &[f64], k: usize) -> Result<f64> {
    check_spectrum_and_k(eigenvalues, k)?;
    let lambda_k1 = eigenvalues[k];
    let c_k = (k + 1) as f64 * lambda_k1 + eigenvalues[k + 1..].iter().sum::<f64>();
    Ok(lambda_k1 / c_k)
}

/// Mini-batch rate algebra for batch size τ and stepsize ω.
#[derive(Clone, Debug)]
pub struct MinibatchRate {
    /// ξ(τ) = 1/τ + (1 − 1/τ)·λ_max(W), the stepsize normalizer.
    pub xi: f64,
    /// ρ(ω, τ) = 1 − ω(2 − ωξ)·λ_min(W), the per-step contraction at ω.
    pub rho: f64,
    /// ω(τ) = 1/ξ(τ), the optimal stepsize.
    pub omega_opt: f64,
    /// ρ(ω(τ), τ) = 1 − λ_min(W)/ξ(τ).
    pub rho_opt: f64,
}

pub fn minibatch_rate(
    lambda_min_w: f64,
    lambda_max_w: f64,
    omega: f64,
    tau: usize,
) -> Result<MinibatchRate> {
    if tau < 1 {
        return Err(Error::InvalidParameter("tau must be >= 1".into()));
    }
    if !(lambda_min_w > 0.0 && lambda_min_w <= lambda_max_w && lambda_max_w <= 1.0 + 1e-10) {
        return Err(Error::InvalidParameter(format!(
            "need 0 < lambda_min_w <= lambda_max_w <= 1, got ({lambda_min_w}, {lambda_max_w})"
        )));
    }
    let t = tau as f64;
    let xi = 1.0 / t + (1.0 - 1.0 / t) * lambda_max_w;
    if !(omega > 0.0 && omega < 2.0 / xi) {
        return Err(Error::InvalidParameter(format!(
            "stepsize omega = {omega} outside (0, 2/xi) with xi = {xi}"
        )));
    }
    Ok(MinibatchRate {
        xi,
        rho: 1.0 - omega * (2.0 - omega * xi) * lambda_min_w,
        omega_opt: 1.0 / xi,
        rho_opt: 1.0 - lambda_min_w / xi,
    })
}

/// λ_{k+1}/F_k with F_k = (1/τ)·C_k + (1 − 1/τ)·λ_n: the optimal mini-batch
/// rate constant of the augmented family.
pub fn msscd_rate(eigenvalues: &[f64], k: usize, tau: usize) -> Result<f64> {
    check_spectrum_and_k(eigenvalues, k)?;
    if tau < 1 {
        return Err(Error::InvalidParameter("tau must be >= 1".into()));
    }
    let t = tau as f64;
    let lambda_k1 = eigenvalues[k];
    let lambda_n = eigenvalues[eigenvalues.len() - 1];
    let c_k = (k + 1) as f64 * lambda_k1 + eigenvalues[k + 1..].iter().sum::<f64>();
    let f_k = c_k / t + (1.0 - 1.0 / t) * lambda_n;
    Ok(lambda_k1 / f_k)
}

// ---------------------------------------------------------------------------
// limits of coordinate sampling

/// λ_min(W) ≤ (1/n)·(Π λ_k/A_kk)^{1/n} for coordinate sampling with any
/// probability vector. Computed in log space.
pub fn lambda_min_upper_bound(a: &SymmetricMatrix) -> Result<f64> {
    let n = a.dim();
    let decomp = jacobi_eigendecompose(a)?;
    if !decomp.is_positive_definite() {
        return Err(Error::NotPositiveDefinite);
    }
    let log_mean = decomp
        .eigenvalues()
        .iter()
        .zip(a.diag())
        .map(|(&l, d)| l.ln() - d.ln())
        .sum::<f64>()
        / n as f64;
    Ok(log_mean.exp() / n as f64)
}

/// Matrix on which coordinate descent is slow for EVERY probability vector:
/// rotation-block embedding of the spectrum (c, 1, …, 1) with c chosen so the
/// geometric-mean bound drops below 1/T.
pub fn construct_bad_matrix_upper(n: usize, t_param: f64) -> Result<SymmetricMatrix> {
    if n < 2 {
        return Err(Error::InvalidParameter("need n >= 2".into()));
    }
    if t_param.is_nan() || t_param <= 0.0 {
        return Err(Error::InvalidParameter("need T > 0".into()));
    }
    // Solve 4c/(1+c)^2 = y for the admissible ratio; the y/(2-y+2sqrt(1-y))
    // form avoids cancellation for tiny y.
    let y = (n as f64 / t_param).powi(n as i32).min(1.0);
    let c = (y / (2.0 - y + 2.0 * (1.0 - y).sqrt())) * (1.0 - 1e-12);
    if c <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "T = {t_param} too extreme for n = {n}: eigenvalue ratio underflows"
        )));
    }
    let mut eigenvalues = vec![1.0; n];
    eigenvalues[0] = c.min(1.0);
    let m = build_rotation_embedding(n)?;
    matrix_from_spectrum(&eigenvalues, &m)
}

/// diag(t, 1, …, 1): the matrix on which diagonal and squared-row-norm
/// importance sampling are arbitrarily worse than uniform sampling.
pub fn importance_counterexample(n: usize, t_param: f64) -> Result<SymmetricMatrix> {
    if n < 2 {
        return Err(Error::InvalidParameter("need n >= 2".into()));
    }
    if t_param.is_nan() || t_param <= 0.0 {
        return Err(Error::InvalidParameter("need t > 0".into()));
    }
    let mut d = vec![1.0; n];
    d[0] = t_param;
    Ok(SymmetricMatrix::diagonal(&d))
}

/// Closed form for λ_min(W) of 2x2 coordinate sampling with probability p on
/// the first coordinate.
pub fn coordinate_lambda_min_2x2(a: &SymmetricMatrix, p: f64) -> Result<f64> {
    if a.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: a.dim(),
        });
    }
    let (aa, bb, cc) = (a.entry(0, 0), a.entry(1, 1), a.entry(0, 1));
    Ok(0.5
        - 0.5
            * (1.0 - 4.0 * p * (1.0 - p) * (1.0 - cc * cc / (aa * bb)))
                .max(0.0)
                .sqrt())
}

/// Grid search (step 0.01) for the probability maximizing λ_min(W(p)) on a
/// 2x2 matrix; the maximizer is 1/2 for every symmetric PD input.
pub fn verify_2d_optimal_probability(a: &SymmetricMatrix) -> Result<f64> {
    if a.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: a.dim(),
        });
    }
    let mut best = (f64::NEG_INFINITY, 0.0);
    for i in 1..100 {
        let p = i as f64 * 0.01;
        let dist = distributions::coordinate_distribution(a, &[p, 1.0 - p])?;
        let w = w_matrix(a, &dist)?;
        let lmin = jacobi_eigendecompose(&w)?.min_eigenvalue();
        if lmin > best.0 {
            best = (lmin, p);
        }
    }
    Ok(best.1)
}

// ---------------------------------------------------------------------------
// inexact conjugate systems

/// ε-dependent bounds for an ε-approximate conjugate system S:
/// eigenvalue bracket of A^{1/2}SSᵀA^{1/2}, its condition number, and the
/// relative A-norm error of the direct solve SSᵀb.
#[derive(Clone, Debug)]
pub struct InexactBoundReport {
    pub eps: f64,
    pub lambda_min_lb: f64,
    pub lambda_max_ub: f64,
    /// +inf when eps(n-1) >= sqrt(2)-1, where the bound stops being meaningful.
    pub cond_ub: f64,
    pub direct_solve_rel_err_ub: f64,
}

pub fn inexact_gram_bounds(n: usize, eps: f64) -> Result<InexactBoundReport> {
    if n == 0 {
        return Err(Error::InvalidParameter("need n >= 1".into()));
    }
    if eps < 0.0 {
        return Err(Error::InvalidParameter("eps must be nonnegative".into()));
    }
    let m = eps * (n as f64 - 1.0);
    if m >= 1.0 {
        return Err(Error::InvalidParameter(format!(
            "eps*(n-1) = {m} >= 1: eigenvalue bounds require eps < 1/(n-1)"
        )));
    }
    let deviation = m * (1.0 + m) / (1.0 - m);
    let cond_ub = if m < std::f64::consts::SQRT_2 - 1.0 {
        (1.0 + m * m) / (1.0 - 2.0 * m - m * m)
    } else {
        f64::INFINITY
    };
    Ok(InexactBoundReport {
        eps,
        lambda_min_lb: 1.0 - deviation,
        lambda_max_ub: 1.0 + deviation,
        cond_ub,
        direct_solve_rel_err_ub: deviation,
    })
}

// ---------------------------------------------------------------------------
// inexact spectral descent neighborhood

/// Size of the neighborhood that inexact spectral descent converges to:
/// errors contract per step as long as the squared A-norm error exceeds
/// r₀/(1−q).
#[derive(Clone, Debug)]
pub struct IssdNeighborhood {
    /// q = max_z zᵀQz / zᵀAz with Q = (I−SSᵀ)A − SEᵀ + EΛ⁻¹Eᵀ.
    pub q: f64,
    /// r₀ = 2‖x_*‖²_{EΛ⁻¹Eᵀ}.
    pub r0: f64,
    /// r₀/(1−q); +inf when q >= 1 (no contraction guarantee).
    pub limit: f64,
}

impl IssdNeighborhood {
    pub fn is_bounded(&self) -> bool {
        self.q < 1.0
    }
}

/// Computes the neighborhood certificate for a set of inexact eigenpairs.
/// Requires the A-Rayleigh-quotient eigenvalue choice λᵢ = wᵢᵀAwᵢ, which
/// makes the residuals step-orthogonal (wᵢᵀεᵢ = 0) and kills the cross term
/// of the one-step recursion.
pub fn issd_neighborhood(
    problem: &QuadraticProblem,
    pairs: &[InexactEigenpair],
) -> Result<IssdNeighborhood> {
    let a = problem.a();
    let n = a.dim();
    if pairs.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: pairs.len(),
        });
    }
    let mut s = Mat::zeros(n, n);
    let mut e = Mat::zeros(n, n);
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
        let residual = {
            let mut aw = a.matvec(&pair.vector);
            linalg::axpy(&mut aw, -pair.value, &pair.vector);
            aw
        };
        let alignment = linalg::dot(&pair.vector, &residual);
        if alignment.abs() > 1e-10 {
            return Err(Error::InvalidParameter(format!(
                "pair {i} does not use the A-Rayleigh-quotient eigenvalue: wᵀε = {alignment:e}"
            )));
        }
        s.set_col(i, &pair.vector);
        e.set_col(i, &residual);
    }

    // Q = (I - SSᵀ)A - SEᵀ + EΛ⁻¹Eᵀ
    let st = s.transpose();
    let i_hat = s.matmul(&st);
    let mut q_mat = Mat::zeros(n, n);
    let a_full = a.mat();
    let i_hat_a = i_hat.matmul(a_full);
    let s_et = s.matmul(&e.transpose());
    // E Λ⁻¹ Eᵀ = Σ εᵢεᵢᵀ/λᵢ
    let mut e_lam_et = Mat::zeros(n, n);
    for (i, pair) in pairs.iter().enumerate() {
        let col = e.col(i);
        let inv_l = 1.0 / pair.value;
        for r in 0..n {
            for c in 0..n {
                let v = e_lam_et.get(r, c) + inv_l * col[r] * col[c];
                e_lam_et.set(r, c, v);
            }
        }
    }
    for r in 0..n {
        for c in 0..n {
            let v = a_full.get(r, c) - i_hat_a.get(r, c) - s_et.get(r, c) + e_lam_et.get(r, c);
            q_mat.set(r, c, v);
        }
    }

    // q depends on Q only through its symmetric part; computed as the top
    // eigenvalue of A^{-1/2}·sym(Q)·A^{-1/2}.
    let sym_q = SymmetricMatrix::symmetrized(q_mat)?;
    let a_decomp = jacobi_eigendecompose(a)?;
    if !a_decomp.is_positive_definite() {
        return Err(Error::NotPositiveDefinite);
    }
    let inv_half = matrix_power(&a_decomp, -0.5)?;
    let pencil =
        SymmetricMatrix::symmetrized(inv_half.mat().matmul(&sym_q.mat().matmul(inv_half.mat())))?;
    let q = jacobi_eigendecompose(&pencil)?.max_eigenvalue();

    let x_star = problem.x_star();
    let r0 = 2.0
        * (0..n)
            .map(|i| {
                let proj = linalg::dot(&e.col(i), x_star);
                proj * proj / pairs[i].value
            })
            .sum::<f64>();
    let limit = if q < 1.0 {
        r0 / (1.0 - q)
    } else {
        f64::INFINITY
    };
    Ok(IssdNeighborhood { q, r0, limit })
}
