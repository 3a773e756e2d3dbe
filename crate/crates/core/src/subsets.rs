//! Exhaustive ground truth over all `2^k` subsets of the candidate covariates.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::reversal::{RegressionProblem, Sign};

/// Default upper bound on `k` for exhaustive enumeration.
pub const DEFAULT_SUBSET_CEILING: usize = 20;

/// A subset of the candidate columns, bit `i` selecting column `i` of `U`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubsetId(pub u64);

impl SubsetId {
    pub fn cardinality(self) -> u32 {
        self.0.count_ones()
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    /// Labels of the selected columns, in column order.
    pub fn labels(self, candidates: &[String]) -> Vec<&str> {
        candidates
            .iter()
            .enumerate()
            .filter(|(i, _)| self.contains(*i))
            .map(|(_, l)| l.as_str())
            .collect()
    }
}

/// Fitted sign of the `x` coefficient for one subset.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SubsetOutcome {
    pub subset: SubsetId,
    pub coefficient: f64,
    pub sign: Sign,
}

/// Result of [`enumerate_subsets`].
#[derive(Clone, Debug, PartialEq)]
pub struct SubsetReport {
    /// Labels of `U`; bit `i` of a [`SubsetId`] refers to `candidates[i]`.
    pub candidates: Vec<String>,
    /// One entry per subset in binary-counter order (entry `i` is `SubsetId(i)`).
    pub outcomes: Vec<SubsetOutcome>,
    /// Subsets whose sign differs from the empty subset, smallest first.
    pub flipping_subsets: Vec<SubsetId>,
    pub any_reversal: bool,
}

impl SubsetReport {
    /// Assembles a report from per-subset outcomes given in any order.
    pub fn from_outcomes(candidates: Vec<String>, mut outcomes: Vec<SubsetOutcome>) -> SubsetReport {
        outcomes.sort_by_key(|o| o.subset);
        let baseline = outcomes[0].sign;
        let mut flipping_subsets: Vec<SubsetId> = outcomes
            .iter()
            .filter(|o| o.sign != baseline)
            .map(|o| o.subset)
            .collect();
        flipping_subsets.sort_by_key(|s| (s.cardinality(), s.0));
        let any_reversal = !flipping_subsets.is_empty();
        SubsetReport { candidates, outcomes, flipping_subsets, any_reversal }
    }

    pub fn baseline_sign(&self) -> Sign {
        self.outcomes[0].sign
    }

    pub fn sign_of(&self, subset: SubsetId) -> Option<Sign> {
        self.outcomes.get(subset.0 as usize).map(|o| o.sign)
    }
}

/// Checks the ceiling and returns the number of subsets to evaluate.
pub fn subset_count(problem: &RegressionProblem, ceiling: usize) -> Result<u64> {
    let k = problem.k();
    if k > ceiling || k > 63 {
        return Err(Error::SubsetCeilingExceeded { k, ceiling });
    }
    Ok(1u64 << k)
}

/// Fits `y` on `[e x W s]` for one subset `s`.
pub fn evaluate_subset(problem: &RegressionProblem, subset: SubsetId) -> Result<SubsetOutcome> {
    let coefficient = problem.coefficient_with(subset.0)?;
    // The sign scale uses the W-residualized norms, as in `diagnose`.
    let ctx = problem.residualized()?;
    let sign = problem.sign_of(coefficient, &ctx);
    Ok(SubsetOutcome { subset, coefficient, sign })
}

/// Fits every subset of `U` and reports which ones flip the sign of the
/// coefficient of `x`. A subset whose coefficient has no definite sign counts
/// as a flip unless the baseline is also indeterminate.
pub fn enumerate_subsets(problem: &RegressionProblem, ceiling: usize) -> Result<SubsetReport> {
    let count = subset_count(problem, ceiling)?;
    let ctx = problem.residualized()?;
    let outcomes = (0..count)
        .map(|mask| {
            let coefficient = problem.coefficient_with(mask)?;
            Ok(SubsetOutcome { subset: SubsetId(mask), coefficient, sign: problem.sign_of(coefficient, &ctx) })
        })
        .collect::<Result<Vec<_>>>()?;
    let candidates = problem.u().labels().map(String::from).collect();
    Ok(SubsetReport::from_outcomes(candidates, outcomes))
}
