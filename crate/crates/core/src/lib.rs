//! Randomized descent methods for strongly convex quadratic minimization.
//!
//! The crate solves min ½xᵀAx − bᵀx for symmetric positive definite A by
//! projecting the iterate along randomly sampled directions, and pairs every
//! method with its exact convergence-rate machinery:
//!
//! - [`linalg`] — dense symmetric eigendecomposition, matrix functions,
//!   conjugate-direction systems, special constructions.
//! - [`distributions`] — the direction distributions that parameterize the
//!   methods, including the spectral-augmented family and its optimal
//!   parameters.
//! - [`solvers`] — the iterative methods: stochastic descent, mini-batch
//!   averaging, spectral and conjugate specializations, inexact variants, and
//!   the direct conjugate solve.
//! - [`theory`] — closed-form rates, the W-matrix, upper/lower bounds, and
//!   constructive counterexamples for importance sampling.
//! - [`experiments`] — seeded Monte Carlo harness, spectrum generators,
//!   preset experiment suites, CSV serialization.

pub mod distributions;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod solvers;
pub mod theory;

pub use distributions::{DirectionDistribution, DistributionSpec, SscdParams};
pub use error::{Error, Result};
pub use linalg::{ConjugateSystem, Mat, SpectralDecomposition, SymmetricMatrix};
pub use solvers::{ConvergenceTrace, InexactEigenpair, QuadraticProblem, SolverConfig};
pub use theory::{InexactBoundReport, IssdNeighborhood, RateReport};
