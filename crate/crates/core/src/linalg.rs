//! Labeled columns and dense least squares.
//!
//! Fits are computed by orthogonalizing the design column by column
//! ([`Orthonormal`](crate::vector::Orthonormal)) and back-substituting the
//! triangular factor. The normal equations are never formed.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::vector::{self, Orthonormal};

/// A column is declared dependent when its residual norm after projecting out
/// the preceding design columns falls below this fraction of its own norm.
pub const RANK_TOL: f64 = 1e-10;

/// Label used for the all-ones column in error messages.
pub const INTERCEPT_LABEL: &str = "(intercept)";

/// A labeled column of real observations.
#[derive(Clone, Debug, PartialEq)]
pub struct DataColumn {
    label: String,
    values: Vec<f64>,
}

impl DataColumn {
    /// Requires at least two entries, all finite.
    pub fn new(label: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        let label = label.into();
        if values.len() < 2 {
            return Err(Error::InvalidColumn { label, reason: "fewer than two observations" });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidColumn { label, reason: "non-finite entry" });
        }
        Ok(Self { label, values })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mean(&self) -> f64 {
        vector::mean(&self.values)
    }

    /// Euclidean norm.
    pub fn norm(&self) -> f64 {
        vector::norm(&self.values)
    }

    pub fn dot(&self, other: &DataColumn) -> f64 {
        vector::dot(&self.values, &other.values)
    }

    pub fn relabeled(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Multiplies every entry by `c`; the result keeps this column's label.
    pub fn scaled(&self, c: f64) -> Self {
        Self { label: self.label.clone(), values: vector::scaled(&self.values, c) }
    }

    /// True when the centered column is numerically zero relative to the raw one.
    pub fn is_constant(&self) -> bool {
        let raw = self.norm();
        let centered = vector::norm(&vector::centered(&self.values));
        raw == 0.0 || centered <= 1e-12 * raw
    }

    // Internal constructor for vectors produced by our own arithmetic.
    pub(crate) fn from_parts(label: String, values: Vec<f64>) -> Self {
        debug_assert!(values.len() >= 2);
        Self { label, values }
    }
}

/// An ordered collection of equal-length columns with unique labels.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DataMatrix {
    columns: Vec<DataColumn>,
}

impl DataMatrix {
    pub fn new(columns: Vec<DataColumn>) -> Result<Self> {
        let mut m = Self::empty();
        for c in columns {
            m.push(c)?;
        }
        Ok(m)
    }

    /// A matrix with no columns; it is compatible with any row count.
    pub fn empty() -> Self {
        Self { columns: Vec::new() }
    }

    pub fn push(&mut self, column: DataColumn) -> Result<()> {
        if let Some(n) = self.nrows() {
            if column.len() != n {
                return Err(Error::DimensionMismatch {
                    label: column.label,
                    expected: n,
                    found: column.values.len(),
                });
            }
        }
        if self.columns.iter().any(|c| c.label == column.label) {
            return Err(Error::DuplicateLabel(column.label));
        }
        self.columns.push(column);
        Ok(())
    }

    pub fn columns(&self) -> &[DataColumn] {
        &self.columns
    }

    pub fn into_columns(self) -> Vec<DataColumn> {
        self.columns
    }

    pub fn ncols(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    /// Row count, or `None` for a matrix without columns.
    pub fn nrows(&self) -> Option<usize> {
        self.columns.first().map(DataColumn::len)
    }

    pub fn column(&self, label: &str) -> Option<&DataColumn> {
        self.columns.iter().find(|c| c.label == label)
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.columns.iter().map(DataColumn::label)
    }

    pub fn iter(&self) -> core::slice::Iter<'_, DataColumn> {
        self.columns.iter()
    }

    /// Columns whose bit is set in `mask`, in their original order.
    pub fn select_mask(&self, mask: u64) -> DataMatrix {
        let columns = self
            .columns
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, c)| c.clone())
            .collect();
        DataMatrix { columns }
    }

    /// Concatenation; fails on label clashes or row-count mismatch.
    pub fn concat(&self, other: &DataMatrix) -> Result<DataMatrix> {
        let mut out = self.clone();
        for c in other.iter() {
            out.push(c.clone())?;
        }
        Ok(out)
    }
}

impl<'a> IntoIterator for &'a DataMatrix {
    type Item = &'a DataColumn;
    type IntoIter = core::slice::Iter<'a, DataColumn>;

    fn into_iter(self) -> Self::IntoIter {
        self.columns.iter()
    }
}

/// Output of [`ols_fit`].
#[derive(Clone, Debug, PartialEq)]
pub struct FitResult {
    /// Intercept first (when requested), then one entry per regressor column.
    pub coefficients: Vec<f64>,
    pub fitted: Vec<f64>,
    pub residuals: Vec<f64>,
}

/// Subtracts the mean.
pub fn center(v: &DataColumn) -> DataColumn {
    DataColumn::from_parts(v.label.clone(), vector::centered(&v.values))
}

struct Factorization {
    q: Orthonormal,
    // r[j] holds column j of the upper-triangular factor (length j + 1).
    r: Vec<Vec<f64>>,
}

fn factor(design: &[(&str, &[f64])]) -> Result<Factorization> {
    let mut q = Orthonormal::new();
    let mut r = Vec::with_capacity(design.len());
    for (label, col) in design {
        let appended = q
            .push(col, RANK_TOL)
            .ok_or_else(|| Error::RankDeficient { column: label.to_string() })?;
        let mut rcol = appended.coords;
        rcol.push(appended.residual_norm);
        r.push(rcol);
    }
    Ok(Factorization { q, r })
}

impl Factorization {
    fn solve(&self, z: &[f64]) -> Vec<f64> {
        let qtz: Vec<f64> = self.q.basis.iter().map(|qi| vector::dot(qi, z)).collect();
        let p = qtz.len();
        let mut beta = vec![0.0; p];
        for i in (0..p).rev() {
            let mut s = qtz[i];
            for (j, bj) in beta.iter().enumerate().skip(i + 1) {
                s -= self.r[j][i] * bj;
            }
            beta[i] = s / self.r[i][i];
        }
        beta
    }

    /// Row norms of R^{-1}: sqrt of the diagonal of (X'X)^{-1}.
    fn inverse_gram_diagonal(&self) -> Vec<f64> {
        let p = self.r.len();
        // Solve R * col_k = e_k for each k, accumulate squared row entries.
        let mut diag = vec![0.0; p];
        for k in 0..p {
            let mut col = vec![0.0; p];
            for i in (0..=k).rev() {
                let tail: f64 = (i + 1..=k).map(|j| self.r[j][i] * col[j]).sum();
                let s = if i == k { 1.0 } else { 0.0 } - tail;
                col[i] = s / self.r[i][i];
            }
            for (d, c) in diag.iter_mut().zip(&col) {
                *d += c * c;
            }
        }
        diag
    }
}

fn design_columns<'a>(
    response: &DataColumn,
    regressors: &'a DataMatrix,
    ones: &'a [f64],
    include_intercept: bool,
) -> Result<Vec<(&'a str, &'a [f64])>> {
    let n = response.len();
    let mut design: Vec<(&str, &[f64])> = Vec::with_capacity(regressors.ncols() + 1);
    if include_intercept {
        design.push((INTERCEPT_LABEL, ones));
    }
    for c in regressors {
        if c.len() != n {
            return Err(Error::DimensionMismatch {
                label: c.label.clone(),
                expected: n,
                found: c.len(),
            });
        }
        design.push((c.label(), c.values()));
    }
    Ok(design)
}

/// Least-squares fit of `response` on `[e regressors]` (or `regressors` alone).
///
/// Errors with [`Error::RankDeficient`] naming the first design column that is
/// dependent on the ones before it.
pub fn ols_fit(
    response: &DataColumn,
    regressors: &DataMatrix,
    include_intercept: bool,
) -> Result<FitResult> {
    let ones = vec![1.0; response.len()];
    let design = design_columns(response, regressors, &ones, include_intercept)?;
    let z = response.values();
    let f = factor(&design)?;
    let coefficients = f.solve(z);
    let fitted = f.q.project(z);
    // One refinement step keeps the residual orthogonal to the design.
    let mut residuals = vector::sub(z, &fitted);
    let correction = f.q.project(&residuals);
    for (r, c) in residuals.iter_mut().zip(&correction) {
        *r -= c;
    }
    let fitted = vector::sub(z, &residuals);
    Ok(FitResult { coefficients, fitted, residuals })
}

/// `target` minus its fitted values on `[e controls]`; centers when `controls` is empty.
/// The result keeps the target's label.
pub fn residualize(target: &DataColumn, controls: &DataMatrix) -> Result<DataColumn> {
    let fit = ols_fit(target, controls, true)?;
    Ok(DataColumn::from_parts(target.label.clone(), fit.residuals))
}

/// Residualizes every column of `m` against `controls`.
pub fn residualize_all(m: &DataMatrix, controls: &DataMatrix) -> Result<DataMatrix> {
    let cols = m.iter().map(|c| residualize(c, controls)).collect::<Result<Vec<_>>>()?;
    DataMatrix::new(cols)
}

/// Coefficient of `x_res` when `y_res` is regressed on `[e x_res u_res]`, via
/// the closed form
///
/// `(<x,y> - <x^(u), y^(u)>) / (<x,x> - <x^(u), x^(u)>)`
///
/// where `x^(u)` and `y^(u)` are projections onto the span of `u_res`.
/// Inputs are centered here, so the result equals the intercept fit even for
/// uncentered arguments.
pub fn adjusted_coefficient(y_res: &DataColumn, x_res: &DataColumn, u_res: &DataMatrix) -> Result<f64> {
    let n = x_res.len();
    for c in core::iter::once(y_res).chain(u_res.iter()) {
        if c.len() != n {
            return Err(Error::DimensionMismatch { label: c.label.clone(), expected: n, found: c.len() });
        }
    }
    let x = vector::centered(x_res.values());
    let y = vector::centered(y_res.values());
    let mut basis = Orthonormal::new();
    for u in u_res {
        basis
            .push(&vector::centered(u.values()), RANK_TOL)
            .ok_or_else(|| Error::RankDeficient { column: u.label.clone() })?;
    }
    let x_hat = basis.project(&x);
    let y_hat = basis.project(&y);
    let numerator = vector::dot(&x, &y) - vector::dot(&x_hat, &y_hat);
    // <x,x> - <x^,x^> equals |x - x^|^2; the latter avoids cancellation.
    let x_perp = vector::sub(&x, &x_hat);
    let denominator = vector::dot(&x_perp, &x_perp);
    if denominator <= RANK_TOL * RANK_TOL * vector::dot(&x, &x) {
        return Err(Error::RankDeficient { column: x_res.label.clone() });
    }
    Ok(numerator / denominator)
}

/// One row of a fitted coefficient table.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientRow {
    pub label: String,
    pub estimate: f64,
    /// `NaN` when the fit has no residual degrees of freedom.
    pub std_error: f64,
    pub t_statistic: f64,
}

/// Coefficients of `response` on `[e regressors]` with classical standard
/// errors and t statistics.
pub fn coefficient_table(response: &DataColumn, regressors: &DataMatrix) -> Result<Vec<CoefficientRow>> {
    let ones = vec![1.0; response.len()];
    let design = design_columns(response, regressors, &ones, true)?;
    let f = factor(&design)?;
    let z = response.values();
    let beta = f.solve(z);
    let resid = vector::sub(z, &f.q.project(z));
    let dof = response.len() as f64 - design.len() as f64;
    let sigma2 = if dof > 0.0 { vector::dot(&resid, &resid) / dof } else { f64::NAN };
    let diag = f.inverse_gram_diagonal();
    Ok(design
        .iter()
        .zip(beta.iter().zip(&diag))
        .map(|((label, _), (&b, &d))| {
            let se = libm::sqrt(sigma2 * d);
            CoefficientRow { label: label.to_string(), estimate: b, std_error: se, t_statistic: b / se }
        })
        .collect())
}
