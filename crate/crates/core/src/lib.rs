//! Sign-reversal analysis for least-squares coefficients.
//!
//! Given a response `y`, an explanatory column `x`, baseline controls `W`
//! and a set of candidate covariates `U`, this crate decides whether the
//! sign of the fitted coefficient of `x` can change when any subset of `U`
//! is added to the model. It provides:
//!
//! - [`linalg`]: centering, least squares by orthogonalization, residualization
//!   and the closed-form adjusted coefficient.
//! - [`stats`]: correlations, coefficients of determination, their partial
//!   versions, the `v` axis and the `r*` threshold.
//! - [`reversal`]: the exact reversal ratio and the two sufficient stability
//!   bounds, assembled by [`reversal::diagnose`].
//! - [`cone`]: the single-covariate reversal cone (membership, canonical frame,
//!   boundary sampling).
//! - [`subsets`]: exhaustive ground truth over all `2^k` covariate subsets.
//! - [`simpson`]: categorical studies, Simpson's paradox and its necessary
//!   conditions.
//! - [`counterexamples`]: parametric four-row instances that show where weaker
//!   reasoning breaks down.
//!
//! The crate is `no_std` and only needs `alloc`.
//!
//! ```
//! use reversal_core::linalg::{DataColumn, DataMatrix};
//! use reversal_core::reversal::{diagnose, RegressionProblem, Verdict};
//!
//! let y = DataColumn::new("y", vec![1.0, 2.0, 2.0, 4.0, 5.0, 4.5]).unwrap();
//! let x = DataColumn::new("x", vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
//! let u = DataColumn::new("u", vec![0.3, -0.1, 0.4, 0.2, -0.5, 0.1]).unwrap();
//! let problem = RegressionProblem::new(y, x, DataMatrix::empty(), DataMatrix::new(vec![u]).unwrap()).unwrap();
//! let diag = diagnose(&problem).unwrap();
//! assert_ne!(diag.verdict, Verdict::ReversalCertain);
//! ```
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod cone;
pub mod counterexamples;
mod error;
pub mod linalg;
pub mod reversal;
pub mod simpson;
pub mod stats;
pub mod subsets;
mod vector;

pub use error::{Error, Result};
pub use linalg::{DataColumn, DataMatrix, FitResult};
pub use reversal::{diagnose, RegressionProblem, ReversalDiagnostics, Sign, Tolerances, Verdict};
