//! Random orthogonal matrices and the fixed rotation-block embedding.

use rand::Rng;
use rand_distr::StandardNormal;

use super::{dot, Mat};
use crate::error::{Error, Result};

/// Haar-like random orthogonal matrix: Gram-Schmidt orthonormalization of a
/// standard normal matrix. The normalization keeps the R diagonal positive,
/// which is what makes the distribution uniform over the orthogonal group.
pub fn sample_random_orthogonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Mat> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "orthogonal matrix dimension must be positive".into(),
        ));
    }
    'attempt: for _ in 0..100 {
        let g = Mat::from_fn(n, n, |_, _| rng.sample(StandardNormal));
        let mut q = Mat::zeros(n, n);
        for j in 0..n {
            let mut v = g.col(j);
            // two passes of re-orthogonalization
            for _ in 0..2 {
                for i in 0..j {
                    let qi = q.col(i);
                    let c = dot(&qi, &v);
                    for (vk, qk) in v.iter_mut().zip(&qi) {
                        *vk -= c * qk;
                    }
                }
            }
            let norm = dot(&v, &v).sqrt();
            if norm < 1e-8 {
                continue 'attempt;
            }
            for vk in v.iter_mut() {
                *vk /= norm;
            }
            q.set_col(j, &v);
        }
        if q.orthogonality_defect() <= 1e-10 {
            return Ok(q);
        }
    }
    Err(Error::InvalidParameter(
        "failed to sample an orthogonal matrix".into(),
    ))
}

/// Orthogonal matrix with a 2x2 rotation block in the leading corner and the
/// identity elsewhere:
///
/// ```text
///  1/√2  1/√2  0 ...
/// -1/√2  1/√2  0 ...
///   0     0    1 ...
/// ```
pub fn build_rotation_embedding(n: usize) -> Result<Mat> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "rotation embedding requires n >= 2, got {n}"
        )));
    }
    let h = 1.0 / 2.0_f64.sqrt();
    let mut m = Mat::identity(n);
    m.set(0, 0, h);
    m.set(0, 1, h);
    m.set(1, 0, -h);
    m.set(1, 1, h);
    Ok(m)
}
