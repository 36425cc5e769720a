//! Self-contained dense symmetric linear algebra.
//!
//! Everything here is plain row-major `f64` storage: a general dense matrix
//! [`Mat`], a validated [`SymmetricMatrix`], the Jacobi eigensolver, random
//! orthogonal matrices, and A-conjugate direction systems. No external
//! linear-algebra backend; all routines are deterministic functions of their
//! inputs (plus an explicit RNG handle where one is taken).

mod conjugate;
mod jacobi;
mod orthogonal;

pub use conjugate::{a_gram_schmidt, approx_conjugate_system, ConjugateSystem};
pub use jacobi::jacobi_eigendecompose;
pub use orthogonal::{build_rotation_embedding, sample_random_orthogonal};

use crate::error::{Error, Result};

// ---------------------------------------------------------------------------
// vector helpers

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// y += alpha * x
pub fn axpy(y: &mut [f64], alpha: f64, x: &[f64]) {
    debug_assert_eq!(y.len(), x.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn norm2(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(v: &[f64], alpha: f64) -> Vec<f64> {
    v.iter().map(|x| alpha * x).collect()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

// ---------------------------------------------------------------------------
// general dense matrix

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Mat::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn set_col(&mut self, j: usize, v: &[f64]) {
        debug_assert_eq!(v.len(), self.rows);
        for (i, x) in v.iter().enumerate() {
            self.set(i, j, *x);
        }
    }

    pub fn transpose(&self) -> Mat {
        Mat::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        debug_assert_eq!(v.len(), self.cols);
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    pub fn matmul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self.get(i, k);
                if aik == 0.0 {
                    continue;
                }
                let orow = other.row(k);
                let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (o, b) in out_row.iter_mut().zip(orow) {
                    *o += aik * b;
                }
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn fro_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// max |MᵀM - I|; a cheap orthogonality measure.
    pub fn orthogonality_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.cols {
            for j in i..self.cols {
                let mut s = 0.0;
                for r in 0..self.rows {
                    s += self.get(r, i) * self.get(r, j);
                }
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((s - target).abs());
            }
        }
        worst
    }
}

// ---------------------------------------------------------------------------
// symmetric matrix

/// Square matrix with exact entrywise symmetry, enforced at construction.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricMatrix {
    mat: Mat,
}

impl SymmetricMatrix {
    /// Wraps a matrix that is already exactly symmetric.
    pub fn from_mat(mat: Mat) -> Result<Self> {
        if mat.rows() != mat.cols() {
            return Err(Error::DimensionMismatch {
                expected: mat.rows(),
                found: mat.cols(),
            });
        }
        for i in 0..mat.rows() {
            for j in (i + 1)..mat.cols() {
                let d = mat.get(i, j) - mat.get(j, i);
                if d != 0.0 {
                    return Err(Error::NotSymmetric {
                        i,
                        j,
                        delta: d.abs(),
                    });
                }
            }
        }
        Ok(SymmetricMatrix { mat })
    }

    /// Replaces A by (A + Aᵀ)/2, which is exactly symmetric.
    pub fn symmetrized(mat: Mat) -> Result<Self> {
        if mat.rows() != mat.cols() {
            return Err(Error::DimensionMismatch {
                expected: mat.rows(),
                found: mat.cols(),
            });
        }
        let n = mat.rows();
        let mut out = Mat::zeros(n, n);
        for i in 0..n {
            out.set(i, i, mat.get(i, i));
            for j in (i + 1)..n {
                let v = 0.5 * (mat.get(i, j) + mat.get(j, i));
                out.set(i, j, v);
                out.set(j, i, v);
            }
        }
        Ok(SymmetricMatrix { mat: out })
    }

    /// Builds from the upper triangle of `f`; the lower triangle is mirrored.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, f(i, i));
            for j in (i + 1)..n {
                let v = f(i, j);
                m.set(i, j, v);
                m.set(j, i, v);
            }
        }
        SymmetricMatrix { mat: m }
    }

    pub fn identity(n: usize) -> Self {
        SymmetricMatrix {
            mat: Mat::identity(n),
        }
    }

    pub fn diagonal(d: &[f64]) -> Self {
        let mut m = Mat::zeros(d.len(), d.len());
        for (i, x) in d.iter().enumerate() {
            m.set(i, i, *x);
        }
        SymmetricMatrix { mat: m }
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.mat.get(i, j)
    }

    pub fn mat(&self) -> &Mat {
        &self.mat
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        self.mat.row(i)
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.entry(i, i)).collect()
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.entry(i, i)).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.mat.max_abs()
    }

    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        self.mat.matvec(v)
    }

    /// Squared row norms ‖A_{i:}‖², used by row-norm importance sampling.
    pub fn row_norms_sq(&self) -> Vec<f64> {
        (0..self.dim())
            .map(|i| dot(self.row(i), self.row(i)))
            .collect()
    }
}

// ---------------------------------------------------------------------------
// spectral decomposition

/// Eigenvalues in ascending order with orthonormal eigenvectors as columns.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    eigenvectors: Mat,
}

impl SpectralDecomposition {
    /// Assembles a decomposition from known pieces, validating orthogonality
    /// (within 1e-10) and the ascending eigenvalue order.
    pub fn new(eigenvalues: Vec<f64>, eigenvectors: Mat) -> Result<Self> {
        let n = eigenvalues.len();
        if eigenvectors.rows() != n || eigenvectors.cols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: eigenvectors.rows(),
            });
        }
        if eigenvalues.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidParameter(
                "eigenvalues must be in ascending order".into(),
            ));
        }
        let defect = eigenvectors.orthogonality_defect();
        if defect > 1e-10 {
            return Err(Error::NotOrthogonal { delta: defect });
        }
        Ok(SpectralDecomposition {
            eigenvalues,
            eigenvectors,
        })
    }

    pub(crate) fn new_unchecked(eigenvalues: Vec<f64>, eigenvectors: Mat) -> Self {
        SpectralDecomposition {
            eigenvalues,
            eigenvectors,
        }
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &Mat {
        &self.eigenvectors
    }

    /// Column `i`, paired with `eigenvalues()[i]`.
    pub fn eigenvector(&self, i: usize) -> Vec<f64> {
        self.eigenvectors.col(i)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues[self.eigenvalues.len() - 1]
    }

    pub fn is_positive_definite(&self) -> bool {
        self.min_eigenvalue() > 0.0
    }
}

// ---------------------------------------------------------------------------
// operations

/// vᵀAv, the squared A-norm of `v`.
pub fn a_norm_sq(a: &SymmetricMatrix, v: &[f64]) -> Result<f64> {
    if v.len() != a.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: v.len(),
        });
    }
    Ok(dot(v, &a.matvec(v)))
}

/// Assembles A = UΛUᵀ from an ascending positive spectrum and an orthogonal U.
pub fn matrix_from_spectrum(eigenvalues: &[f64], u: &Mat) -> Result<SymmetricMatrix> {
    let n = eigenvalues.len();
    if u.rows() != n || u.cols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: u.rows(),
        });
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
    let defect = u.orthogonality_defect();
    if defect > 1e-10 {
        return Err(Error::NotOrthogonal { delta: defect });
    }
    Ok(SymmetricMatrix::from_fn(n, |i, j| {
        (0..n)
            .map(|k| u.get(i, k) * eigenvalues[k] * u.get(j, k))
            .sum()
    }))
}

/// UΛᵖUᵀ. Fractional or negative exponents require a positive spectrum.
pub fn matrix_power(decomp: &SpectralDecomposition, p: f64) -> Result<SymmetricMatrix> {
    let n = decomp.dim();
    let integer_exponent = p.fract() == 0.0;
    if (!integer_exponent || p < 0.0) && decomp.eigenvalues().iter().any(|&l| l <= 0.0) {
        return Err(Error::Domain(format!(
            "matrix power {p} requires a strictly positive spectrum (min eigenvalue {:e})",
            decomp.min_eigenvalue()
        )));
    }
    let powered: Vec<f64> = decomp
        .eigenvalues()
        .iter()
        .map(|&l| {
            if integer_exponent && p.abs() <= i32::MAX as f64 {
                l.powi(p as i32)
            } else {
                l.powf(p)
            }
        })
        .collect();
    let u = decomp.eigenvectors();
    Ok(SymmetricMatrix::from_fn(n, |i, j| {
        (0..n).map(|k| u.get(i, k) * powered[k] * u.get(j, k)).sum()
    }))
}

// ---------------------------------------------------------------------------
// text format

/// Parses the matrix text format: first line `n`, then n rows of n decimals.
/// Symmetry is validated to 1e-9 (relative to the largest entry) and the
/// result symmetrized as (A + Aᵀ)/2.
pub fn parse_matrix_text(text: &str) -> Result<SymmetricMatrix> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let first = lines
        .next()
        .ok_or_else(|| Error::Parse("empty matrix file".into()))?;
    let n: usize = first
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("first line must be the dimension, got {first:?}")))?;
    if n == 0 {
        return Err(Error::Parse("matrix dimension must be positive".into()));
    }
    let mut m = Mat::zeros(n, n);
    for i in 0..n {
        let line = lines
            .next()
            .ok_or_else(|| Error::Parse(format!("expected {n} rows, found {i}")))?;
        let values: Vec<f64> = line
            .split_whitespace()
            .map(|t| {
                t.parse::<f64>()
                    .map_err(|_| Error::Parse(format!("row {i}: cannot parse {t:?} as a number")))
            })
            .collect::<Result<_>>()?;
        if values.len() != n {
            return Err(Error::Parse(format!(
                "row {i}: expected {n} entries, found {}",
                values.len()
            )));
        }
        for (j, v) in values.into_iter().enumerate() {
            m.set(i, j, v);
        }
    }
    let scale = m.max_abs().max(1.0);
    for i in 0..n {
        for j in (i + 1)..n {
            let d = (m.get(i, j) - m.get(j, i)).abs();
            if d > 1e-9 * scale {
                return Err(Error::Parse(format!(
                    "symmetry violation at ({i}, {j}): |{} - {}| = {d:e}",
                    m.get(i, j),
                    m.get(j, i)
                )));
            }
        }
    }
    SymmetricMatrix::symmetrized(m)
}

pub fn load_matrix_text(path: &std::path::Path) -> Result<SymmetricMatrix> {
    parse_matrix_text(&std::fs::read_to_string(path)?)
}

pub fn matrix_to_text(a: &SymmetricMatrix) -> String {
    let n = a.dim();
    let mut out = format!("{n}\n");
    for i in 0..n {
        let row: Vec<String> = a.row(i).iter().map(|v| format!("{v}")).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}
