//! Four-row instances that defeat reasoning weaker than the exact criterion.
//!
//! - [`gen_need_r2`]: two candidates, each nearly uncorrelated with `x` and
//!   `y`, jointly reverse the sign. Pairwise correlations are not enough.
//! - [`gen_need_partial`]: a candidate uncorrelated with `x` and `y` reverses
//!   the sign once a baseline control is present. Partial coefficients are
//!   needed.
//! - [`gen_no_full_fitted_corr`]: each candidate alone reverses the sign but
//!   the pair does not, so the exact criterion for the full set says nothing
//!   about its subsets.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::SQRT_2;

use crate::error::{Error, Result};
use crate::linalg::{DataColumn, DataMatrix};
use crate::reversal::{Checks, RegressionProblem};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    NeedR2,
    NeedPartial,
    NoFullFittedCorr,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::NeedR2, Family::NeedPartial, Family::NoFullFittedCorr];

    pub fn as_str(self) -> &'static str {
        match self {
            Family::NeedR2 => "need-r2",
            Family::NeedPartial => "need-partial",
            Family::NoFullFittedCorr => "no-full-fitted-corr",
        }
    }

    pub fn parse(s: &str) -> Option<Family> {
        Family::ALL.into_iter().find(|f| f.as_str() == s)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CounterexampleInstance {
    pub family: Family,
    pub epsilon: Option<f64>,
    pub delta: Option<f64>,
    /// Columns `y, x, u1, u2` or `y, x, w, u`.
    pub data: DataMatrix,
    /// Limits of named quantities as the parameters go to zero.
    pub expected: BTreeMap<String, f64>,
}

impl CounterexampleInstance {
    /// The instance as a regression problem (relaxed checks: four rows cannot
    /// hold five independent columns).
    pub fn problem(&self) -> Result<RegressionProblem> {
        let col = |l: &str| self.data.column(l).cloned().expect("generator column");
        let (w, u) = match self.family {
            Family::NeedPartial => (vec![col("w")], vec![col("u")]),
            Family::NeedR2 | Family::NoFullFittedCorr => (vec![], vec![col("u1"), col("u2")]),
        };
        RegressionProblem::with_checks(col("y"), col("x"), DataMatrix::new(w)?, DataMatrix::new(u)?, Checks::Relaxed)
    }
}

fn check_unit(what: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain { what, value })
    }
}

const Y: [f64; 4] = [(SQRT_2 + 3.0) / 2.0, (SQRT_2 - 3.0) / 2.0, -0.5, -0.5];
const X: [f64; 4] = [(-SQRT_2 + 3.0) / 2.0, (-SQRT_2 - 3.0) / 2.0, 0.5, 0.5];

fn matrix(cols: [(&str, [f64; 4]); 4]) -> DataMatrix {
    DataMatrix::new(cols.iter().map(|(l, v)| DataColumn::new(*l, v.to_vec()).expect("finite")).collect())
        .expect("distinct labels")
}

fn expected(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|(k, v)| (String::from(*k), *v)).collect()
}

/// Two candidates with vanishing pairwise correlations that jointly reverse
/// the sign (adjusted coefficient exactly -1). Requires `0 < epsilon < 1`.
pub fn gen_need_r2(epsilon: f64) -> Result<CounterexampleInstance> {
    check_unit("epsilon", epsilon)?;
    let e = epsilon / SQRT_2;
    let data = matrix([
        ("y", Y),
        ("x", X),
        ("u1", [e, -e, 1.0, -1.0]),
        ("u2", [e, -e, -1.0, 1.0]),
    ]);
    Ok(CounterexampleInstance {
        family: Family::NeedR2,
        epsilon: Some(epsilon),
        delta: None,
        data,
        expected: expected(&[
            ("beta_x", 0.5),
            ("r_u1_x", 0.0),
            ("r_u1_y", 0.0),
            ("r_u2_x", 0.0),
            ("r_u2_y", 0.0),
            ("R_ux*R_uy", 0.75),
            ("beta_x|u1,u2", -1.0),
        ]),
    })
}

/// A candidate orthogonal to `x` and `y` that reverses the sign in the
/// presence of the control `w`. Requires `0 < delta < 1`.
pub fn gen_need_partial(delta: f64) -> Result<CounterexampleInstance> {
    check_unit("delta", delta)?;
    let d = delta / SQRT_2;
    let data = matrix([
        ("y", Y),
        ("x", X),
        ("w", [d, -d, 1.0, -1.0]),
        ("u", [0.0, 0.0, -1.0, 1.0]),
    ]);
    Ok(CounterexampleInstance {
        family: Family::NeedPartial,
        epsilon: None,
        delta: Some(delta),
        data,
        expected: expected(&[
            ("beta_x|w", 0.5),
            ("r_u_x", 0.0),
            ("r_u_y", 0.0),
            ("r_w_x", 0.0),
            ("r_w_y", 0.0),
            ("beta_x|w,u", -0.4),
        ]),
    })
}

/// Each candidate alone reverses the sign while the pair restores it.
/// Requires `0 < epsilon, delta < 1`.
pub fn gen_no_full_fitted_corr(epsilon: f64, delta: f64) -> Result<CounterexampleInstance> {
    check_unit("epsilon", epsilon)?;
    check_unit("delta", delta)?;
    let (e, ds) = (epsilon, delta * SQRT_2);
    let t = 3.0 * SQRT_2;
    let data = matrix([
        ("y", Y),
        ("x", X),
        ("u1", [(e + t) / 2.0, (e - t) / 2.0, (-e + ds) / 2.0, (-e - ds) / 2.0]),
        ("u2", [(-e + t) / 2.0, (-e - t) / 2.0, (e + ds) / 2.0, (e - ds) / 2.0]),
    ]);
    Ok(CounterexampleInstance {
        family: Family::NoFullFittedCorr,
        epsilon: Some(epsilon),
        delta: Some(delta),
        data,
        expected: expected(&[
            ("beta_x", 0.5),
            ("beta_x|u1,u2", 1.0),
            ("beta_x|u1", -1.0),
            ("beta_x|u2", -1.0),
        ]),
    })
}

/// Dispatches on `family`; `delta` is ignored for [`Family::NeedR2`] and
/// `epsilon` for [`Family::NeedPartial`].
pub fn generate(family: Family, epsilon: f64, delta: f64) -> Result<CounterexampleInstance> {
    match family {
        Family::NeedR2 => gen_need_r2(epsilon),
        Family::NeedPartial => gen_need_partial(delta),
        Family::NoFullFittedCorr => gen_no_full_fitted_corr(epsilon, delta),
    }
}

/// Rows of the instance, for export.
pub fn rows(instance: &CounterexampleInstance) -> Vec<Vec<f64>> {
    (0..4)
        .map(|i| instance.data.iter().map(|c| c.values()[i]).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn domain_errors() {
        assert!(gen_need_r2(0.0).is_err());
        assert!(gen_need_r2(1.0).is_err());
        assert!(gen_need_partial(-0.1).is_err());
        assert!(gen_no_full_fitted_corr(0.5, 1.5).is_err());
    }

    #[test]
    fn entries_match_closed_forms() {
        let eps = 0.002;
        let inst = gen_need_r2(eps).unwrap();
        let u1 = inst.data.column("u1").unwrap().values();
        assert_eq!(u1, &[eps / 2f64.sqrt(), -eps / 2f64.sqrt(), 1.0, -1.0]);
        let inst = gen_no_full_fitted_corr(0.01, 0.02).unwrap();
        let u2 = inst.data.column("u2").unwrap().values();
        let s2 = 2f64.sqrt();
        assert_eq!(u2[3], (0.01 - 0.02 * s2) / 2.0);
        assert_eq!(u2[0], (-0.01 + 3.0 * s2) / 2.0);
        assert_eq!(inst.data.column("y").unwrap().values()[0], (s2 + 3.0) / 2.0);
        assert_eq!(rows(&inst)[2].len(), 4);
    }

    #[test]
    fn family_names() {
        for f in Family::ALL {
            assert_eq!(Family::parse(f.as_str()), Some(f));
        }
    }
}
