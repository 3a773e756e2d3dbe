//! Exact reversal criterion and the two one-sided stability guarantees.
//!
//! For residualized `x`, `y` and candidate block `u`, adding `u` flips the sign
//! of the coefficient of `x` exactly when
//!
//! ```text
//! R(u, x) * R(u, y) * r(x^(u), y^(u)) / r(x, y) > 1
//! ```
//!
//! Two weaker conditions certify that *no* subset of `u` flips the sign:
//! the product bound `R(u, x) * R(u, y) < |r(x, y)|`, and the axis bound
//! `R^2(u, v) < r*`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{self, DataColumn, DataMatrix, RANK_TOL};
use crate::stats::{self, PartialContext};
use crate::vector::{self, Orthonormal};

/// Numerical thresholds used by the decision procedures.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// A coefficient with `|b| < sign * |y_res| / |x_res|` has no definite sign.
    pub sign: f64,
    /// Reversal ratios within this distance of 1 are treated as the boundary.
    pub ratio_boundary: f64,
    /// Partial correlations below this magnitude make the baseline sign undefined.
    pub baseline: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { sign: 1e-10, ratio_boundary: 1e-9, baseline: 1e-10 }
    }
}

/// Sign of a fitted coefficient.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Negative,
    Indeterminate,
    Positive,
}

impl Sign {
    /// Classifies `value`, treating magnitudes up to `threshold` as indeterminate.
    pub fn of(value: f64, threshold: f64) -> Sign {
        if value > threshold {
            Sign::Positive
        } else if value < -threshold {
            Sign::Negative
        } else {
            Sign::Indeterminate
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Sign::Negative => "negative",
            Sign::Indeterminate => "indeterminate",
            Sign::Positive => "positive",
        }
    }
}

/// The response, the explanatory column, baseline controls `W` and candidate covariates `U`.
#[derive(Clone, Debug, PartialEq)]
pub struct RegressionProblem {
    y: DataColumn,
    x: DataColumn,
    w: DataMatrix,
    u: DataMatrix,
    tolerances: Tolerances,
}

/// How strictly [`RegressionProblem::with_checks`] validates its input.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Checks {
    /// `{e, y, x, W, U}` must be linearly independent.
    Strict,
    /// `{e, x, W, U}` must be linearly independent; `y` may lie in their span.
    Design,
    /// Only shapes, labels and non-constant columns are checked. Used for
    /// hand-built instances with exact orthogonality or `n` equal to the
    /// number of fitted parameters.
    Relaxed,
}

impl RegressionProblem {
    pub fn new(y: DataColumn, x: DataColumn, w: DataMatrix, u: DataMatrix) -> Result<Self> {
        Self::with_checks(y, x, w, u, Checks::Strict)
    }

    pub fn with_checks(y: DataColumn, x: DataColumn, w: DataMatrix, u: DataMatrix, checks: Checks) -> Result<Self> {
        if u.is_empty() {
            return Err(Error::InvalidColumn { label: "U".into(), reason: "at least one candidate covariate is required" });
        }
        let mut all = DataMatrix::new(alloc::vec![y.clone(), x.clone()])?;
        all = all.concat(&w)?.concat(&u)?;
        for c in all.iter() {
            if c.is_constant() {
                return Err(Error::ZeroVariance { column: c.label().into() });
            }
        }
        if checks != Checks::Relaxed {
            let mut basis = Orthonormal::new();
            let ones = alloc::vec![1.0; y.len()];
            basis.push(&ones, RANK_TOL);
            let skip = usize::from(checks == Checks::Design);
            for c in all.iter().skip(skip) {
                basis
                    .push(c.values(), RANK_TOL)
                    .ok_or_else(|| Error::RankDeficient { column: c.label().into() })?;
            }
        }
        Ok(Self { y, x, w, u, tolerances: Tolerances::default() })
    }

    pub fn with_tolerances(mut self, tolerances: Tolerances) -> Self {
        self.tolerances = tolerances;
        self
    }

    pub fn y(&self) -> &DataColumn {
        &self.y
    }

    pub fn x(&self) -> &DataColumn {
        &self.x
    }

    pub fn w(&self) -> &DataMatrix {
        &self.w
    }

    pub fn u(&self) -> &DataMatrix {
        &self.u
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tolerances
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn p(&self) -> usize {
        self.w.ncols()
    }

    pub fn k(&self) -> usize {
        self.u.ncols()
    }

    /// `x`, `y` and `U` residualized on `[e W]`.
    pub fn residualized(&self) -> Result<PartialContext> {
        PartialContext::new(&self.x, &self.y, &self.u, &self.w)
    }

    /// Coefficient of `x` from the full fit of `y` on `[e x W s]`, with `s` the
    /// columns of `U` selected by `mask`.
    pub fn coefficient_with(&self, mask: u64) -> Result<f64> {
        let regs = DataMatrix::new(alloc::vec![self.x.clone()])?
            .concat(&self.w)?
            .concat(&self.u.select_mask(mask))?;
        Ok(linalg::ols_fit(&self.y, &regs, true)?.coefficients[1])
    }

    /// Sign of a coefficient of `x`, scaled by `|y_{|w}| / |x_{|w}|`.
    pub(crate) fn sign_of(&self, beta: f64, ctx: &PartialContext) -> Sign {
        let scale = ctx.y_res.norm() / ctx.x_res.norm();
        Sign::of(beta, self.tolerances.sign * scale)
    }
}

/// Outcome of [`diagnose`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    /// Adding all of `U` flips the sign.
    ReversalCertain,
    /// No subset of `U` can flip the sign, by the product bound.
    StableByProductBound,
    /// No subset of `U` can flip the sign, by the `R^2(u, v) < r*` bound.
    StableByAxisBound,
    Indeterminate,
}

impl Verdict {
    /// Stable external name used in reports.
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::ReversalCertain => "ReversalCertain",
            Verdict::StableByProductBound => "StableAllSubsets_Cor1",
            Verdict::StableByAxisBound => "StableAllSubsets_Cor2",
            Verdict::Indeterminate => "Indeterminate",
        }
    }

    pub fn parse(s: &str) -> Option<Verdict> {
        [
            Verdict::ReversalCertain,
            Verdict::StableByProductBound,
            Verdict::StableByAxisBound,
            Verdict::Indeterminate,
        ]
        .into_iter()
        .find(|v| v.as_str() == s)
    }

    pub fn is_stable(self) -> bool {
        matches!(self, Verdict::StableByProductBound | Verdict::StableByAxisBound)
    }
}

/// Every scalar behind a verdict.
#[derive(Clone, Debug, PartialEq)]
pub struct ReversalDiagnostics {
    /// `r_{x,y|w}`.
    pub partial_r: f64,
    /// `R(u_{|w}, x_{|w})`.
    pub multiple_r_ux: f64,
    /// `R(u_{|w}, y_{|w})`.
    pub multiple_r_uy: f64,
    /// Correlation of the projections of `x_{|w}` and `y_{|w}` onto `u_{|w}`;
    /// zero when either projection vanishes.
    pub fitted_corr: f64,
    pub reversal_ratio: f64,
    /// Threshold computed from `|r_{x,y|w}|`.
    pub r_star: f64,
    /// `R^2(u_{|w}, v)` with `v` built after aligning `x` with `y`.
    pub r2_u_v: f64,
    pub beta_unadjusted: f64,
    pub beta_adjusted: f64,
    pub sign_unadjusted: Sign,
    pub sign_adjusted: Sign,
    pub product_bound: bool,
    pub axis_bound: bool,
    pub verdict: Verdict,
}

struct RatioParts {
    partial_r: f64,
    r_ux: f64,
    r_uy: f64,
    fitted_corr: f64,
    ratio: f64,
}

fn ratio_parts(ctx: &PartialContext, tol: &Tolerances) -> Result<RatioParts> {
    let partial_r = ctx.partial_r()?;
    if libm::fabs(partial_r) < tol.baseline {
        return Err(Error::DegenerateBaseline);
    }
    let mut basis = Orthonormal::new();
    for u in &ctx.u_res {
        let scale = u.norm();
        if scale == 0.0 {
            return Err(Error::ZeroVariance { column: u.label().into() });
        }
        basis
            .push(&vector::centered(u.values()), RANK_TOL)
            .ok_or_else(|| Error::RankDeficient { column: u.label().into() })?;
    }
    let x = vector::centered(ctx.x_res.values());
    let y = vector::centered(ctx.y_res.values());
    let x_hat = basis.project(&x);
    let y_hat = basis.project(&y);
    let r_ux = libm::sqrt(stats::coef_determination(&ctx.u_res, &ctx.x_res)?);
    let r_uy = libm::sqrt(stats::coef_determination(&ctx.u_res, &ctx.y_res)?);
    let (nxh, nyh) = (vector::norm(&x_hat), vector::norm(&y_hat));
    let fitted_corr = if nxh <= RANK_TOL * vector::norm(&x) || nyh <= RANK_TOL * vector::norm(&y) {
        0.0
    } else {
        (vector::dot(&x_hat, &y_hat) / (nxh * nyh)).clamp(-1.0, 1.0)
    };
    let ratio = r_ux * r_uy * fitted_corr / partial_r;
    Ok(RatioParts { partial_r, r_ux, r_uy, fitted_corr, ratio })
}

/// `R(u,x) R(u,y) r(x^(u), y^(u)) / r(x,y)` on data residualized for `W`.
/// A value above 1 means adding `U` reverses the sign of the coefficient of `x`.
pub fn reversal_ratio(problem: &RegressionProblem) -> Result<f64> {
    Ok(ratio_parts(&problem.residualized()?, &problem.tolerances)?.ratio)
}

/// `true` certifies that no subset of the candidates reverses the sign;
/// `false` is inconclusive.
pub fn product_bound_stable(r_ux: f64, r_uy: f64, r_xy: f64) -> bool {
    r_ux * r_uy < libm::fabs(r_xy)
}

struct AxisParts {
    r_star: f64,
    r2_u_v: f64,
}

/// `v` and `r*` after replacing `x` by `-x` when the partial correlation is negative.
pub(crate) fn aligned_axis(x_res: &DataColumn, y_res: &DataColumn, partial_r: f64) -> Result<(DataColumn, f64)> {
    let x_aligned = if partial_r < 0.0 { x_res.scaled(-1.0) } else { x_res.clone() };
    let ctx = PartialContext {
        x_res: x_aligned,
        y_res: y_res.clone(),
        u_res: DataMatrix::empty(),
        controls_label: Default::default(),
    };
    let v = stats::v_vector(&ctx)?;
    let r_star = stats::r_star(libm::fabs(partial_r))?;
    Ok((v, r_star))
}

fn axis_parts(ctx: &PartialContext, partial_r: f64, tol: &Tolerances) -> Result<AxisParts> {
    if libm::fabs(partial_r) < tol.baseline {
        return Err(Error::DegenerateBaseline);
    }
    if partial_r <= -1.0 + tol.baseline {
        return Err(Error::Domain { what: "partial correlation", value: partial_r });
    }
    let (v, r_star) = aligned_axis(&ctx.x_res, &ctx.y_res, partial_r)?;
    let r2_u_v = stats::coef_determination(&ctx.u_res, &v)?;
    Ok(AxisParts { r_star, r2_u_v })
}

/// `true` when `R^2(u_{|w}, v) < r*`, which certifies that no subset of the
/// candidates reverses the sign. When `r_{x,y|w} < 0`, `x` is negated first so
/// that `v` and `r*` are built from a positive correlation.
pub fn axis_bound_stable(problem: &RegressionProblem) -> Result<bool> {
    let ctx = problem.residualized()?;
    let partial_r = ctx.partial_r()?;
    let parts = axis_parts(&ctx, partial_r, &problem.tolerances)?;
    Ok(parts.r2_u_v < parts.r_star)
}

/// Computes every diagnostic and the verdict.
///
/// Precedence: a ratio above `1 + ratio_boundary` is a certain reversal; a
/// ratio within the boundary band is indeterminate; otherwise the product
/// bound, then the axis bound, then indeterminate.
pub fn diagnose(problem: &RegressionProblem) -> Result<ReversalDiagnostics> {
    let tol = &problem.tolerances;
    let ctx = problem.residualized()?;
    let parts = ratio_parts(&ctx, tol)?;
    let axis = axis_parts(&ctx, parts.partial_r, tol)?;

    let beta_unadjusted = ctx.x_res.dot(&ctx.y_res) / ctx.x_res.dot(&ctx.x_res);
    let beta_adjusted = linalg::adjusted_coefficient(&ctx.y_res, &ctx.x_res, &ctx.u_res)?;
    let product_bound = product_bound_stable(parts.r_ux, parts.r_uy, parts.partial_r);
    let axis_bound = axis.r2_u_v < axis.r_star;

    let verdict = if parts.ratio > 1.0 + tol.ratio_boundary {
        Verdict::ReversalCertain
    } else if libm::fabs(parts.ratio - 1.0) <= tol.ratio_boundary {
        Verdict::Indeterminate
    } else if product_bound {
        Verdict::StableByProductBound
    } else if axis_bound {
        Verdict::StableByAxisBound
    } else {
        Verdict::Indeterminate
    };

    Ok(ReversalDiagnostics {
        partial_r: parts.partial_r,
        multiple_r_ux: parts.r_ux,
        multiple_r_uy: parts.r_uy,
        fitted_corr: parts.fitted_corr,
        reversal_ratio: parts.ratio,
        r_star: axis.r_star,
        r2_u_v: axis.r2_u_v,
        beta_unadjusted,
        beta_adjusted,
        sign_unadjusted: problem.sign_of(beta_unadjusted, &ctx),
        sign_adjusted: problem.sign_of(beta_adjusted, &ctx),
        product_bound,
        axis_bound,
        verdict,
    })
}

/// Labels of `U`, in column order.
pub fn candidate_labels(problem: &RegressionProblem) -> Vec<&str> {
    problem.u.labels().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::center;
    use alloc::vec;
    use approx::assert_abs_diff_eq;

    fn col(label: &str, v: &[f64]) -> DataColumn {
        DataColumn::new(label, v.to_vec()).unwrap()
    }

    // y and x correlated; u centered and orthogonal to both (and to e).
    fn orthogonal_problem() -> RegressionProblem {
        let x = col("x", &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let y = col("y", &[1.5, 1.0, 3.5, 3.0, 5.5, 5.0]);
        let xc = center(&x);
        let yc = center(&y);
        // start from an arbitrary vector and project out e, x, y
        let mut basis = Orthonormal::new();
        basis.push(&[1.0; 6], 1e-12);
        basis.push(xc.values(), 1e-12);
        basis.push(yc.values(), 1e-12);
        let raw = [0.3, -1.2, 0.8, 2.0, -0.4, 0.1];
        let u = vector::sub(&raw, &basis.project(&raw));
        let u = DataColumn::new("u", u).unwrap();
        RegressionProblem::new(y, x, DataMatrix::empty(), DataMatrix::new(vec![u]).unwrap()).unwrap()
    }

    #[test]
    fn orthogonal_candidates_give_zero_ratio_and_product_stability() {
        let p = orthogonal_problem();
        assert_abs_diff_eq!(reversal_ratio(&p).unwrap(), 0.0, epsilon = 1e-12);
        let d = diagnose(&p).unwrap();
        assert_eq!(d.verdict, Verdict::StableByProductBound);
        assert!(axis_bound_stable(&p).unwrap());
    }

    #[test]
    fn product_bound_examples() {
        assert!(product_bound_stable(0.82, 0.81, 0.91));
        assert_abs_diff_eq!(0.82 * 0.81, 0.66, epsilon = 0.005);
        assert!(!product_bound_stable(1.0, 1.0, 0.5));
        assert!(product_bound_stable(0.0, 0.7, 0.2));
        assert!(product_bound_stable(0.0, 1.0, -0.01));
        // strict inequality: ties are inconclusive
        assert!(!product_bound_stable(0.5, 0.5, 0.25));
    }

    #[test]
    fn axis_bound_scalar_arithmetic() {
        let rs = stats::r_star(0.91).unwrap();
        assert!(0.84 < rs);
    }

    #[test]
    fn strict_construction_rejects_dependence() {
        let x = col("x", &[1.0, 2.0, 3.0, 4.0, 5.0]);
        let y = col("y", &[2.0, 1.0, 4.0, 3.0, 6.0]);
        let u = col("u", &[3.0, 3.0, 7.0, 7.0, 11.0]); // x + y
        let err = RegressionProblem::new(y.clone(), x.clone(), DataMatrix::empty(), DataMatrix::new(vec![u.clone()]).unwrap());
        assert_eq!(err.unwrap_err(), Error::RankDeficient { column: "u".into() });
        assert!(RegressionProblem::with_checks(y.clone(), x.clone(), DataMatrix::empty(), DataMatrix::new(vec![u.clone()]).unwrap(), Checks::Relaxed).is_ok());
        let design = RegressionProblem::with_checks(y, x, DataMatrix::empty(), DataMatrix::new(vec![u]).unwrap(), Checks::Design);
        assert!(design.is_ok());
    }

    #[test]
    fn design_check_allows_response_in_span() {
        let x = col("x", &[1.0, 2.0, 3.0, 5.0]);
        let u = col("u", &[2.0, -1.0, 0.0, 1.0]);
        let y = col("y", &[3.0, 1.0, 3.0, 6.0]); // x + u
        let (w, um) = (DataMatrix::empty(), DataMatrix::new(vec![u]).unwrap());
        assert!(RegressionProblem::new(y.clone(), x.clone(), w.clone(), um.clone()).is_err());
        assert!(RegressionProblem::with_checks(y, x, w, um, Checks::Design).is_ok());
    }

    #[test]
    fn constant_columns_rejected() {
        let x = col("x", &[1.0, 2.0, 3.0, 4.0, 5.0]);
        let y = col("y", &[2.0, 1.0, 4.0, 3.0, 6.0]);
        let u = col("u", &[1.0; 5]);
        let err = RegressionProblem::new(y, x, DataMatrix::empty(), DataMatrix::new(vec![u]).unwrap());
        assert_eq!(err.unwrap_err(), Error::ZeroVariance { column: "u".into() });
    }

    #[test]
    fn degenerate_baseline() {
        let x = col("x", &[-1.0, 0.0, 1.0, 0.0]);
        let y = col("y", &[1.0, -1.0, 1.0, 3.0]);
        let u = col("u", &[1.0, 2.0, 0.0, 5.0]);
        let p = RegressionProblem::with_checks(y, x, DataMatrix::empty(), DataMatrix::new(vec![u]).unwrap(), Checks::Relaxed).unwrap();
        assert_eq!(reversal_ratio(&p), Err(Error::DegenerateBaseline));
        assert_eq!(axis_bound_stable(&p), Err(Error::DegenerateBaseline));
    }

    #[test]
    fn single_candidate_reversal_and_signs() {
        // y = x - 2u + noise, with x and u strongly correlated
        let x = col("x", &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0]);
        let u = col("u", &[1.1, 1.9, 3.2, 3.8, 5.1, 6.2, 6.9]);
        let y: Vec<f64> = x.values().iter().zip(u.values()).enumerate()
            .map(|(i, (a, b))| a - 2.0 * b + 0.05 * (i as f64 % 3.0)).collect();
        let y = DataColumn::new("y", y).unwrap();
        let p = RegressionProblem::new(y, x, DataMatrix::empty(), DataMatrix::new(vec![u]).unwrap()).unwrap();
        let d = diagnose(&p).unwrap();
        assert_eq!(d.sign_unadjusted, Sign::Negative);
        assert_eq!(d.sign_adjusted, Sign::Positive);
        assert!(d.reversal_ratio > 1.0);
        assert_eq!(d.verdict, Verdict::ReversalCertain);
        assert_abs_diff_eq!(d.fitted_corr.abs(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(d.beta_adjusted, p.coefficient_with(1).unwrap(), epsilon = 1e-9);
        assert_abs_diff_eq!(d.beta_unadjusted, p.coefficient_with(0).unwrap(), epsilon = 1e-12);
    }

    #[test]
    fn verdict_names_roundtrip() {
        for v in [Verdict::ReversalCertain, Verdict::StableByProductBound, Verdict::StableByAxisBound, Verdict::Indeterminate] {
            assert_eq!(Verdict::parse(v.as_str()), Some(v));
        }
    }
}
