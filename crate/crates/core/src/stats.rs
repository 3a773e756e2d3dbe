//! Correlations, coefficients of determination and their partial versions.
//!
//! Every coefficient of determination here is computed with an intercept, as
//! `1 - RSS / TSS` of a projection onto `[e m]`. It depends only on the column
//! span of the regressors, so recoding a set of indicators with a different
//! basis leaves it unchanged.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{self, DataColumn, DataMatrix, RANK_TOL};
use crate::vector;

/// Pearson correlation.
pub fn corr(a: &DataColumn, b: &DataColumn) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { label: b.label().into(), expected: a.len(), found: b.len() });
    }
    for c in [a, b] {
        if c.is_constant() {
            return Err(Error::ZeroVariance { column: c.label().into() });
        }
    }
    let ac = vector::centered(a.values());
    let bc = vector::centered(b.values());
    let r = vector::dot(&ac, &bc) / (vector::norm(&ac) * vector::norm(&bc));
    Ok(r.clamp(-1.0, 1.0))
}

/// `R^2(m, z)`: share of the centered variance of `response` explained by a fit on `[e regressors]`.
pub fn coef_determination(regressors: &DataMatrix, response: &DataColumn) -> Result<f64> {
    if response.is_constant() {
        return Err(Error::ZeroVariance { column: response.label().into() });
    }
    if regressors.is_empty() {
        return Ok(0.0);
    }
    let fit = linalg::ols_fit(response, regressors, true)?;
    let tss = vector::norm(&vector::centered(response.values()));
    let rss = vector::norm(&fit.residuals);
    let r2 = 1.0 - (rss / tss) * (rss / tss);
    Ok(r2.clamp(0.0, 1.0))
}

/// Residualizes `target` and fails with `ZeroVariance` if nothing is left of it.
fn nonvanishing_residual(target: &DataColumn, controls: &DataMatrix) -> Result<DataColumn> {
    let res = linalg::residualize(target, controls)?;
    let scale = vector::norm(&vector::centered(target.values()));
    if res.norm() <= RANK_TOL * scale || scale == 0.0 {
        return Err(Error::ZeroVariance { column: target.label().into() });
    }
    Ok(res)
}

/// `r_{x,y|w}`: correlation of `x` and `y` after residualizing both on `[e controls]`.
pub fn partial_corr(x: &DataColumn, y: &DataColumn, controls: &DataMatrix) -> Result<f64> {
    let xr = nonvanishing_residual(x, controls)?;
    let yr = nonvanishing_residual(y, controls)?;
    corr(&xr, &yr)
}

/// `R(u_{|w}, z_{|w})`: positive square root of the coefficient of
/// determination of the residualized `z` on the residualized `u`.
pub fn partial_multiple_r(u: &DataMatrix, z: &DataColumn, controls: &DataMatrix) -> Result<f64> {
    let zr = nonvanishing_residual(z, controls)?;
    let ur = u
        .iter()
        .map(|c| nonvanishing_residual(c, controls))
        .collect::<Result<Vec<_>>>()?;
    let r2 = coef_determination(&DataMatrix::new(ur)?, &zr)?;
    Ok(libm::sqrt(r2))
}

/// `x`, `y` and `u` residualized on a common set of controls.
#[derive(Clone, Debug, PartialEq)]
pub struct PartialContext {
    pub x_res: DataColumn,
    pub y_res: DataColumn,
    pub u_res: DataMatrix,
    /// Comma-separated labels of the controls, for reporting.
    pub controls_label: String,
}

impl PartialContext {
    pub fn new(x: &DataColumn, y: &DataColumn, u: &DataMatrix, controls: &DataMatrix) -> Result<Self> {
        let mut controls_label = String::new();
        for (i, l) in controls.labels().enumerate() {
            if i > 0 {
                controls_label.push(',');
            }
            controls_label.push_str(l);
        }
        Ok(Self {
            x_res: linalg::residualize(x, controls)?,
            y_res: linalg::residualize(y, controls)?,
            u_res: linalg::residualize_all(u, controls)?,
            controls_label,
        })
    }

    /// `r_{x,y|w}`.
    pub fn partial_r(&self) -> Result<f64> {
        corr(&self.x_res, &self.y_res)
    }
}

/// `v = x_{|w}/|x_{|w}| + y_{|w}/|y_{|w}|`.
///
/// When the residuals point in opposite directions the result is the zero
/// vector; callers exclude a partial correlation of -1 before using it.
pub fn v_vector(ctx: &PartialContext) -> Result<DataColumn> {
    let nx = ctx.x_res.norm();
    let ny = ctx.y_res.norm();
    if nx == 0.0 {
        return Err(Error::ZeroVariance { column: ctx.x_res.label().into() });
    }
    if ny == 0.0 {
        return Err(Error::ZeroVariance { column: ctx.y_res.label().into() });
    }
    let mut v = vector::scaled(ctx.x_res.values(), 1.0 / nx);
    vector::axpy(&mut v, 1.0 / ny, ctx.y_res.values());
    Ok(DataColumn::from_parts(String::from("v"), v))
}

/// `r* = |2r / (r + 1)|`.
pub fn r_star(r: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&r) || r == -1.0 {
        return Err(Error::Domain { what: "correlation for r*", value: r });
    }
    Ok(libm::fabs(2.0 * r / (r + 1.0)))
}
