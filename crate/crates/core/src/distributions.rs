//! Direction distributions for stochastic descent.
//!
//! A [`DirectionDistribution`] is a finite list of nonzero direction vectors
//! with positive probabilities summing to one. Constructors cover the
//! coordinate, spectral, conjugate and spectral-augmented coordinate families;
//! [`sscd_optimal_params`] produces the rate-optimal augmentation parameters.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, ConjugateSystem, SpectralDecomposition, SymmetricMatrix};
use crate::theory;

/// Finite distribution over descent directions.
#[derive(Clone, Debug)]
pub struct DirectionDistribution {
    directions: Vec<Vec<f64>>,
    probabilities: Vec<f64>,
    cumulative: Vec<f64>,
}

impl DirectionDistribution {
    pub fn new(directions: Vec<Vec<f64>>, probabilities: Vec<f64>) -> Result<Self> {
        if directions.is_empty() {
            return Err(Error::InvalidDistribution(
                "at least one direction is required".into(),
            ));
        }
        if directions.len() != probabilities.len() {
            return Err(Error::InvalidDistribution(format!(
                "{} directions but {} probabilities",
                directions.len(),
                probabilities.len()
            )));
        }
        let dim = directions[0].len();
        for (i, d) in directions.iter().enumerate() {
            if d.len() != dim {
                return Err(Error::InvalidDistribution(format!(
                    "direction {i} has dimension {}, expected {dim}",
                    d.len()
                )));
            }
            if d.iter().all(|&x| x == 0.0) {
                return Err(Error::InvalidDistribution(format!(
                    "direction {i} is the zero vector"
                )));
            }
        }
        if probabilities.iter().any(|&p| p <= 0.0 || !p.is_finite()) {
            return Err(Error::InvalidDistribution(
                "probabilities must be positive and finite".into(),
            ));
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {total}, expected 1"
            )));
        }
        let mut cumulative = Vec::with_capacity(probabilities.len());
        let mut acc = 0.0;
        for &p in &probabilities {
            acc += p;
            cumulative.push(acc);
        }
        Ok(DirectionDistribution {
            directions,
            probabilities,
            cumulative,
        })
    }

    /// Uniform distribution over the given directions.
    pub fn uniform(directions: Vec<Vec<f64>>) -> Result<Self> {
        let k = directions.len();
        Self::new(directions, vec![1.0 / k as f64; k])
    }

    pub fn dim(&self) -> usize {
        self.directions[0].len()
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn direction(&self, j: usize) -> &[f64] {
        &self.directions[j]
    }

    pub fn directions(&self) -> &[Vec<f64>] {
        &self.directions
    }

    pub fn probability(&self, j: usize) -> f64 {
        self.probabilities[j]
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    /// Index of one draw; cumulative-probability inversion on a single
    /// uniform variate, so identical RNG streams give identical sequences.
    pub fn sample_index<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        sample_cumulative(&self.cumulative, u)
    }

    /// One draw from the distribution.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> &[f64] {
        &self.directions[self.sample_index(rng)]
    }
}

/// Shared inversion helper so every uniform-index sampler in the crate walks
/// the same cumulative table and stays stream-compatible.
pub(crate) fn sample_cumulative(cumulative: &[f64], u: f64) -> usize {
    cumulative
        .partition_point(|&c| c <= u)
        .min(cumulative.len() - 1)
}

pub(crate) fn uniform_cumulative(k: usize) -> Vec<f64> {
    (0..k).map(|i| (i + 1) as f64 / k as f64).collect()
}

// ---------------------------------------------------------------------------
// probability vectors for coordinate sampling

pub fn uniform_probabilities(n: usize) -> Vec<f64> {
    vec![1.0 / n as f64; n]
}

/// pᵢ ∝ Aᵢᵢ.
pub fn diagonal_probabilities(a: &SymmetricMatrix) -> Vec<f64> {
    let tr = a.trace();
    a.diag().iter().map(|&d| d / tr).collect()
}

/// pᵢ ∝ ‖A_{i:}‖².
pub fn rownorm_probabilities(a: &SymmetricMatrix) -> Vec<f64> {
    let rn = a.row_norms_sq();
    let total: f64 = rn.iter().sum();
    rn.iter().map(|&x| x / total).collect()
}

// ---------------------------------------------------------------------------
// constructors

/// Standard basis directions e₁…eₙ with the given probabilities.
pub fn coordinate_distribution(a: &SymmetricMatrix, p: &[f64]) -> Result<DirectionDistribution> {
    let n = a.dim();
    if p.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: p.len(),
        });
    }
    let directions = (0..n)
        .map(|i| {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            e
        })
        .collect();
    DirectionDistribution::new(directions, p.to_vec())
}

/// Uniform distribution over the eigenvectors of A.
pub fn uniform_spectral_distribution(
    decomp: &SpectralDecomposition,
) -> Result<DirectionDistribution> {
    let n = decomp.dim();
    DirectionDistribution::uniform((0..n).map(|i| decomp.eigenvector(i)).collect())
}

/// Uniform distribution over the columns of a conjugate system.
pub fn conjugate_distribution(system: &ConjugateSystem) -> Result<DirectionDistribution> {
    let n = system.dim();
    DirectionDistribution::uniform((0..n).map(|i| system.direction(i)).collect())
}

// ---------------------------------------------------------------------------
// spectral-augmented coordinate family

/// Parameters of the spectral-augmented coordinate distribution: coordinates
/// eᵢ are sampled with probability α·Aᵢᵢ/C and eigenvector uᵢ with βᵢ/C,
/// where C = α·Tr(A) + Σβᵢ.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SscdParams {
    pub k: usize,
    pub alpha: f64,
    pub betas: Vec<f64>,
    pub normalizer: f64,
}

impl SscdParams {
    pub fn new(k: usize, alpha: f64, betas: Vec<f64>, normalizer: f64) -> Result<Self> {
        if betas.len() != k {
            return Err(Error::InvalidParameter(format!(
                "expected {k} betas, got {}",
                betas.len()
            )));
        }
        if alpha <= 0.0 {
            return Err(Error::InvalidParameter("alpha must be positive".into()));
        }
        if betas.iter().any(|&b| b < 0.0) {
            return Err(Error::InvalidParameter("betas must be nonnegative".into()));
        }
        if normalizer <= 0.0 {
            return Err(Error::InvalidParameter(
                "normalizer must be positive".into(),
            ));
        }
        Ok(SscdParams {
            k,
            alpha,
            betas,
            normalizer,
        })
    }
}

/// Rate-optimal augmentation parameters: α = 1 and βᵢ = λ_{k+1} − λᵢ, giving
/// C_k = (k+1)λ_{k+1} + Σ_{i≥k+2} λᵢ.
pub fn sscd_optimal_params(eigenvalues: &[f64], k: usize) -> Result<SscdParams> {
    let n = eigenvalues.len();
    validate_spectrum(eigenvalues)?;
    if k >= n {
        return Err(Error::InvalidParameter(format!(
            "k = {k} out of range: need 0 <= k <= n-1 = {}",
            n - 1
        )));
    }
    let lambda_k1 = eigenvalues[k];
    let betas: Vec<f64> = (0..k).map(|i| lambda_k1 - eigenvalues[i]).collect();
    let normalizer = (k + 1) as f64 * lambda_k1 + eigenvalues[k + 1..].iter().sum::<f64>();
    SscdParams::new(k, 1.0, betas, normalizer)
}

fn validate_spectrum(eigenvalues: &[f64]) -> Result<()> {
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
    Ok(())
}

/// Coordinate directions augmented with the k eigenvectors of the smallest
/// eigenvalues, per the stated probabilities. Directions whose probability is
/// exactly zero (βᵢ = 0) are dropped so the distribution invariant holds.
pub fn sscd_distribution(
    a: &SymmetricMatrix,
    decomp: &SpectralDecomposition,
    params: &SscdParams,
) -> Result<DirectionDistribution> {
    let n = a.dim();
    if decomp.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: decomp.dim(),
        });
    }
    if params.k > n.saturating_sub(1) {
        return Err(Error::InvalidParameter(format!(
            "k = {} out of range for n = {n}",
            params.k
        )));
    }
    let implied = params.alpha * a.trace() + params.betas.iter().sum::<f64>();
    if (implied - params.normalizer).abs() > 1e-10 * params.normalizer.abs() {
        return Err(Error::InvalidDistribution(format!(
            "normalizer {} inconsistent with alpha*Tr(A) + sum(betas) = {implied}",
            params.normalizer
        )));
    }
    let c = params.normalizer;
    let mut directions = Vec::with_capacity(n + params.k);
    let mut probabilities = Vec::with_capacity(n + params.k);
    for i in 0..n {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        directions.push(e);
        probabilities.push(params.alpha * a.entry(i, i) / c);
    }
    for (i, &beta) in params.betas.iter().enumerate() {
        if beta == 0.0 {
            continue;
        }
        directions.push(decomp.eigenvector(i));
        probabilities.push(beta / c);
    }
    DirectionDistribution::new(directions, probabilities)
}

/// Coordinate directions augmented with the n−k eigenvectors of the LARGEST
/// eigenvalues (u_{k+1}…u_n), with probabilities analogous to the
/// smallest-eigenvector family. Exists to demonstrate that this variant
/// cannot beat plain coordinate descent.
pub fn largest_eig_distribution(
    a: &SymmetricMatrix,
    decomp: &SpectralDecomposition,
    k: usize,
    alpha: f64,
    betas: &[f64],
) -> Result<DirectionDistribution> {
    let n = a.dim();
    if decomp.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: decomp.dim(),
        });
    }
    if k > n {
        return Err(Error::InvalidParameter(format!("k = {k} out of range")));
    }
    if betas.len() != n - k {
        return Err(Error::InvalidParameter(format!(
            "expected {} betas for the {} largest eigenvectors, got {}",
            n - k,
            n - k,
            betas.len()
        )));
    }
    if alpha <= 0.0 {
        return Err(Error::InvalidParameter("alpha must be positive".into()));
    }
    if betas.iter().any(|&b| b < 0.0) {
        return Err(Error::InvalidParameter("betas must be nonnegative".into()));
    }
    let c = alpha * a.trace() + betas.iter().sum::<f64>();
    let mut directions = Vec::with_capacity(2 * n - k);
    let mut probabilities = Vec::with_capacity(2 * n - k);
    for i in 0..n {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        directions.push(e);
        probabilities.push(alpha * a.entry(i, i) / c);
    }
    for (offset, &beta) in betas.iter().enumerate() {
        if beta == 0.0 {
            continue;
        }
        directions.push(decomp.eigenvector(k + offset));
        probabilities.push(beta / c);
    }
    DirectionDistribution::new(directions, probabilities)
}

/// λ_min of `E[H]` with H = ssᵀ/(sᵀAs); positive iff the distribution spans the
/// space.
pub fn properness_gap(a: &SymmetricMatrix, dist: &DirectionDistribution) -> Result<f64> {
    let eh = theory::expected_h(a, dist)?;
    let d = linalg::jacobi_eigendecompose(&eh)?;
    Ok(d.min_eigenvalue())
}

/// Whether E[ssᵀ/(sᵀAs)] is (numerically) invertible, i.e. whether the
/// distribution spans the space. Threshold 1e-12 on its smallest eigenvalue.
pub fn is_proper(a: &SymmetricMatrix, dist: &DirectionDistribution) -> Result<bool> {
    Ok(properness_gap(a, dist)? > 1e-12)
}

// ---------------------------------------------------------------------------
// declarative spec for configs and the CLI

/// Distribution description as it appears in experiment configs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DistributionSpec {
    UniformCoordinate,
    DiagonalCoordinate,
    RownormCoordinate,
    CustomCoordinate {
        p: Vec<f64>,
    },
    Spectral,
    Conjugate {
        #[serde(default)]
        eps: f64,
    },
    /// Spectral-augmented coordinates; omitted alpha/betas mean the optimal
    /// parameters for the given k.
    Sscd {
        k: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        alpha: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        betas: Option<Vec<f64>>,
    },
    SscdLargest {
        k: usize,
        alpha: f64,
        betas: Vec<f64>,
    },
}

impl DistributionSpec {
    /// Short name used in CSV rows and output file names.
    pub fn label(&self) -> String {
        match self {
            DistributionSpec::UniformCoordinate => "rcd-uniform".into(),
            DistributionSpec::DiagonalCoordinate => "rcd-diagonal".into(),
            DistributionSpec::RownormCoordinate => "rcd-rownorm".into(),
            DistributionSpec::CustomCoordinate { .. } => "rcd-custom".into(),
            DistributionSpec::Spectral => "ssd".into(),
            DistributionSpec::Conjugate { eps } => {
                if *eps == 0.0 {
                    "scond".into()
                } else {
                    format!("scond-eps{eps}")
                }
            }
            DistributionSpec::Sscd { .. } => "sscd".into(),
            DistributionSpec::SscdLargest { .. } => "sscd-largest".into(),
        }
    }

    /// The augmentation size k, where meaningful.
    pub fn k(&self) -> usize {
        match self {
            DistributionSpec::Sscd { k, .. } | DistributionSpec::SscdLargest { k, .. } => *k,
            _ => 0,
        }
    }

    /// Builds the concrete distribution for a problem matrix. The RNG is only
    /// consumed by the conjugate kind (random orthogonal factor).
    pub fn resolve<R: Rng + ?Sized>(
        &self,
        a: &SymmetricMatrix,
        decomp: &SpectralDecomposition,
        rng: &mut R,
    ) -> Result<DirectionDistribution> {
        match self {
            DistributionSpec::UniformCoordinate => {
                coordinate_distribution(a, &uniform_probabilities(a.dim()))
            }
            DistributionSpec::DiagonalCoordinate => {
                coordinate_distribution(a, &diagonal_probabilities(a))
            }
            DistributionSpec::RownormCoordinate => {
                coordinate_distribution(a, &rownorm_probabilities(a))
            }
            DistributionSpec::CustomCoordinate { p } => coordinate_distribution(a, p),
            DistributionSpec::Spectral => uniform_spectral_distribution(decomp),
            DistributionSpec::Conjugate { eps } => {
                let system = linalg::approx_conjugate_system(a, *eps, rng)?;
                conjugate_distribution(&system)
            }
            DistributionSpec::Sscd { k, alpha, betas } => {
                let params =
                    match (alpha, betas) {
                        (None, None) => sscd_optimal_params(decomp.eigenvalues(), *k)?,
                        (Some(al), Some(bs)) => {
                            let c = al * a.trace() + bs.iter().sum::<f64>();
                            SscdParams::new(*k, *al, bs.clone(), c)?
                        }
                        _ => return Err(Error::InvalidParameter(
                            "alpha and betas must be given together (or both omitted for optimal)"
                                .into(),
                        )),
                    };
                sscd_distribution(a, decomp, &params)
            }
            DistributionSpec::SscdLargest { k, alpha, betas } => {
                largest_eig_distribution(a, decomp, *k, *alpha, betas)
            }
        }
    }
}
