//! Cyclic Jacobi eigensolver for dense symmetric matrices.

use super::{Mat, SpectralDecomposition, SymmetricMatrix};
use crate::error::{Error, Result};

const SWEEP_LIMIT: usize = 100;
/// Convergence threshold on the off-diagonal Frobenius norm, relative to ‖A‖_F.
const OFF_TOLERANCE: f64 = 1e-12;

/// Full eigendecomposition by cyclic Jacobi rotations.
///
/// Eigenvalues come out in ascending order, ties broken by original column
/// index; eigenvector column `i` pairs with eigenvalue `i`. Deterministic for
/// identical input. Fails with [`Error::EigenNoConvergence`] if the
/// off-diagonal mass has not dropped below `1e-12 · ‖A‖_F` after 100 sweeps,
/// which signals pathological input.
pub fn jacobi_eigendecompose(a: &SymmetricMatrix) -> Result<SpectralDecomposition> {
    let n = a.dim();
    if n == 0 {
        return Err(Error::InvalidParameter("empty matrix".into()));
    }
    let mut m: Vec<f64> = (0..n).flat_map(|i| a.row(i).to_vec()).collect();
    let mut v = Mat::identity(n);

    let fro: f64 = m.iter().map(|x| x * x).sum::<f64>().sqrt();
    let tol = OFF_TOLERANCE * fro;
    let idx = |i: usize, j: usize| i * n + j;

    let mut converged = fro == 0.0;
    if !converged {
        for _sweep in 0..SWEEP_LIMIT {
            let off: f64 = {
                let mut s = 0.0;
                for p in 0..n {
                    for q in (p + 1)..n {
                        s += 2.0 * m[idx(p, q)] * m[idx(p, q)];
                    }
                }
                s.sqrt()
            };
            if off <= tol {
                converged = true;
                break;
            }
            for p in 0..(n - 1) {
                for q in (p + 1)..n {
                    let apq = m[idx(p, q)];
                    if apq == 0.0 {
                        continue;
                    }
                    let theta = (m[idx(q, q)] - m[idx(p, p)]) / (2.0 * apq);
                    // tan of the rotation angle; stable for large |theta|
                    let t = if theta.abs() > 1e100 {
                        0.5 / theta
                    } else if theta >= 0.0 {
                        1.0 / (theta + (theta * theta + 1.0).sqrt())
                    } else {
                        -1.0 / (-theta + (theta * theta + 1.0).sqrt())
                    };
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    let tau = s / (1.0 + c);

                    m[idx(p, p)] -= t * apq;
                    m[idx(q, q)] += t * apq;
                    m[idx(p, q)] = 0.0;
                    m[idx(q, p)] = 0.0;
                    for r in 0..n {
                        if r == p || r == q {
                            continue;
                        }
                        let mrp = m[idx(r, p)];
                        let mrq = m[idx(r, q)];
                        let new_rp = mrp - s * (mrq + tau * mrp);
                        let new_rq = mrq + s * (mrp - tau * mrq);
                        m[idx(r, p)] = new_rp;
                        m[idx(p, r)] = new_rp;
                        m[idx(r, q)] = new_rq;
                        m[idx(q, r)] = new_rq;
                    }
                    for r in 0..n {
                        let vrp = v.get(r, p);
                        let vrq = v.get(r, q);
                        v.set(r, p, vrp - s * (vrq + tau * vrp));
                        v.set(r, q, vrq + s * (vrp - tau * vrq));
                    }
                }
            }
        }
    }
    if !converged {
        return Err(Error::EigenNoConvergence {
            sweeps: SWEEP_LIMIT,
        });
    }

    let raw: Vec<f64> = (0..n).map(|i| m[idx(i, i)]).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| raw[i].partial_cmp(&raw[j]).unwrap().then(i.cmp(&j)));

    let eigenvalues: Vec<f64> = order.iter().map(|&i| raw[i]).collect();
    let mut eigenvectors = Mat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        for r in 0..n {
            eigenvectors.set(r, dst, v.get(r, src));
        }
    }
    Ok(SpectralDecomposition::new_unchecked(
        eigenvalues,
        eigenvectors,
    ))
}
