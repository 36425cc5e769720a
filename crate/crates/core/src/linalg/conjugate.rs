//! A-conjugate direction systems, exact and ε-approximate.

use rand::Rng;

use super::{
    dot, jacobi_eigendecompose, matrix_power, sample_random_orthogonal, Mat, SymmetricMatrix,
};
use crate::error::{Error, Result};

/// Matrix S = [v₁ … vₙ] of unit-A-norm directions with pairwise A-inner
/// products bounded by the stored tolerance: vᵢᵀAvᵢ = 1 and |vᵢᵀAvⱼ| ≤ ε.
#[derive(Clone, Debug)]
pub struct ConjugateSystem {
    directions: Mat,
    tolerance: f64,
}

impl ConjugateSystem {
    /// Validates the system invariants against `a` before wrapping.
    pub fn new(a: &SymmetricMatrix, directions: Mat, tolerance: f64) -> Result<Self> {
        let n = a.dim();
        if directions.rows() != n || directions.cols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: directions.rows(),
            });
        }
        if tolerance < 0.0 {
            return Err(Error::InvalidParameter(
                "conjugacy tolerance must be nonnegative".into(),
            ));
        }
        // Gram matrix SᵀAS, checked against the unit-diagonal / ε-off-diagonal contract.
        let a_s = a.mat().matmul(&directions);
        for i in 0..n {
            let si = directions.col(i);
            for j in i..n {
                let g = dot(&si, &a_s.col(j));
                if i == j {
                    if (g - 1.0).abs() > 1e-10 {
                        return Err(Error::InvalidParameter(format!(
                            "direction {i} is not unit A-norm: vᵀAv = {g}"
                        )));
                    }
                } else if g.abs() > tolerance + 1e-10 {
                    return Err(Error::InvalidParameter(format!(
                        "|v{i}ᵀAv{j}| = {:e} exceeds tolerance {tolerance:e}",
                        g.abs()
                    )));
                }
            }
        }
        Ok(ConjugateSystem {
            directions,
            tolerance,
        })
    }

    pub fn dim(&self) -> usize {
        self.directions.rows()
    }

    pub fn directions(&self) -> &Mat {
        &self.directions
    }

    pub fn direction(&self, i: usize) -> Vec<f64> {
        self.directions.col(i)
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }
}

/// Gram-Schmidt in the A-inner product: turns a linearly independent basis
/// into an exactly conjugate system (ε = 0) spanning the same space.
pub fn a_gram_schmidt(a: &SymmetricMatrix, basis: &Mat) -> Result<ConjugateSystem> {
    let n = a.dim();
    if basis.rows() != n || basis.cols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: basis.rows(),
        });
    }
    let mut s = Mat::zeros(n, n);
    for j in 0..n {
        let mut v = basis.col(j);
        // two passes keep the Gram matrix near identity even for mildly
        // ill-conditioned bases
        for _ in 0..2 {
            let av = a.matvec(&v);
            for i in 0..j {
                let si = s.col(i);
                let c = dot(&si, &av);
                for (vk, sk) in v.iter_mut().zip(&si) {
                    *vk -= c * sk;
                }
            }
        }
        let norm_sq = dot(&v, &a.matvec(&v));
        let norm = norm_sq.max(0.0).sqrt();
        if norm < 1e-12 {
            return Err(Error::DegenerateBasis { index: j, norm });
        }
        for vk in v.iter_mut() {
            *vk /= norm;
        }
        s.set_col(j, &v);
    }
    ConjugateSystem::new(a, s, 0.0)
}

/// ε-approximate conjugate system S = A^{-1/2} V Ĩ^{1/2}, with V a random
/// orthogonal matrix and Ĩ a unit-diagonal positive definite matrix whose
/// off-diagonal entries are drawn uniformly from [-eps, eps]. Requires
/// eps < 1/(n-1), which also guarantees Ĩ stays positive definite.
pub fn approx_conjugate_system<R: Rng + ?Sized>(
    a: &SymmetricMatrix,
    eps: f64,
    rng: &mut R,
) -> Result<ConjugateSystem> {
    let n = a.dim();
    if eps < 0.0 || eps * ((n - 1) as f64) >= 1.0 {
        return Err(Error::InvalidParameter(format!(
            "eps = {eps} out of range: need 0 <= eps < 1/(n-1) so the Gram matrix stays positive definite"
        )));
    }
    let decomp = jacobi_eigendecompose(a)?;
    if !decomp.is_positive_definite() {
        return Err(Error::NotPositiveDefinite);
    }
    let a_inv_half = matrix_power(&decomp, -0.5)?;
    let v = sample_random_orthogonal(n, rng)?;

    let s = if eps == 0.0 {
        a_inv_half.mat().matmul(&v)
    } else {
        let mut gram = None;
        for _ in 0..100 {
            let candidate = SymmetricMatrix::from_fn(n, |i, j| {
                if i == j {
                    1.0
                } else {
                    rng.random_range(-eps..=eps)
                }
            });
            let d = jacobi_eigendecompose(&candidate)?;
            if d.min_eigenvalue() > 1e-12 {
                gram = Some((candidate, d));
                break;
            }
        }
        let (_, gram_decomp) = gram
            .ok_or_else(|| Error::InvalidParameter("could not sample a PD Gram matrix".into()))?;
        let gram_half = matrix_power(&gram_decomp, 0.5)?;
        a_inv_half.mat().matmul(&v.matmul(gram_half.mat()))
    };
    ConjugateSystem::new(a, s, eps)
}
