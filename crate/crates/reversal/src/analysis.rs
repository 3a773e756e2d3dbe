//! The end-to-end screening workflow: load, optionally standardize, diagnose,
//! enumerate when affordable, and tabulate per-candidate partial correlations.

use std::collections::{BTreeMap, HashSet};
use std::path::PathBuf;

use rayon::prelude::*;
use reversal_core::linalg::{coefficient_table, CoefficientRow, DataColumn, DataMatrix};
use reversal_core::reversal::{diagnose, Checks, RegressionProblem, ReversalDiagnostics, Tolerances, Verdict};
use reversal_core::stats::partial_corr;
use reversal_core::subsets::{evaluate_subset, subset_count, SubsetId, SubsetReport, DEFAULT_SUBSET_CEILING};

use crate::data;
use crate::error::{AppError, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct AnalysisConfig {
    pub input_path: PathBuf,
    pub response: String,
    pub explanatory: String,
    pub controls: Vec<String>,
    /// Empty means every column not used in another role.
    pub candidates: Vec<String>,
    pub standardize: bool,
    pub subset_ceiling: usize,
    /// Keys `sign`, `ratio_boundary`, `baseline`.
    pub tolerance_overrides: Option<BTreeMap<String, f64>>,
    pub seed: u64,
    /// Also condition the per-candidate partial correlations on the
    /// explanatory column.
    pub partials_include_explanatory: bool,
}

impl AnalysisConfig {
    pub fn new(input_path: impl Into<PathBuf>, response: &str, explanatory: &str) -> Self {
        Self {
            input_path: input_path.into(),
            response: response.into(),
            explanatory: explanatory.into(),
            controls: Vec::new(),
            candidates: Vec::new(),
            standardize: false,
            subset_ceiling: DEFAULT_SUBSET_CEILING,
            tolerance_overrides: None,
            seed: 0,
            partials_include_explanatory: false,
        }
    }

    pub fn tolerances(&self) -> Result<Tolerances> {
        let mut tol = Tolerances::default();
        for (key, &value) in self.tolerance_overrides.iter().flatten() {
            if !(value.is_finite() && value >= 0.0) {
                return Err(AppError::Config(format!("tolerance {key} must be a non-negative number")));
            }
            match key.as_str() {
                "sign" => tol.sign = value,
                "ratio_boundary" => tol.ratio_boundary = value,
                "baseline" => tol.baseline = value,
                _ => return Err(AppError::Config(format!("unknown tolerance {key:?}"))),
            }
        }
        Ok(tol)
    }

    /// Candidate labels after applying the "everything else" default.
    pub fn resolved_candidates(&self, data: &DataMatrix) -> Vec<String> {
        if !self.candidates.is_empty() {
            return self.candidates.clone();
        }
        data.labels()
            .filter(|l| *l != self.response && *l != self.explanatory && !self.controls.iter().any(|c| c == l))
            .map(str::to_owned)
            .collect()
    }
}

/// A fit of the response shown for context only; the t statistics play no
/// part in the verdict.
#[derive(Clone, Debug, PartialEq)]
pub struct ContextFit {
    pub name: String,
    pub rows: Vec<CoefficientRow>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub response: String,
    pub explanatory: String,
    pub controls: Vec<String>,
    pub candidates: Vec<String>,
    pub standardized: bool,
    pub diagnostics: ReversalDiagnostics,
    pub subset_report: Option<SubsetReport>,
    /// Why enumeration did not run, when it did not.
    pub subsets_skipped: Option<String>,
    /// Partial correlation of each candidate with the response given the
    /// controls and the other candidates.
    pub per_candidate_partials: Vec<(String, f64)>,
    pub narrative_verdict: String,
    pub context_fits: Vec<ContextFit>,
}

/// Loads `config.input_path` and runs [`analyze`].
pub fn run_analysis(config: &AnalysisConfig) -> Result<Report> {
    let data = data::load_csv(&config.input_path)?;
    analyze(config, &data)
}

fn pick(data: &DataMatrix, label: &str) -> Result<DataColumn> {
    data.column(label).cloned().ok_or_else(|| AppError::UnknownColumn(label.into()))
}

fn pick_all(data: &DataMatrix, labels: &[String]) -> Result<DataMatrix> {
    Ok(DataMatrix::new(labels.iter().map(|l| pick(data, l)).collect::<Result<Vec<_>>>()?)?)
}

/// Runs the workflow on already loaded data.
pub fn analyze(config: &AnalysisConfig, data: &DataMatrix) -> Result<Report> {
    let candidates = config.resolved_candidates(data);
    if candidates.is_empty() {
        return Err(AppError::Config("no candidate covariates".into()));
    }
    let mut seen = HashSet::new();
    let roles = [&config.response, &config.explanatory].into_iter().chain(&config.controls).chain(&candidates);
    for label in roles {
        if data.column(label).is_none() {
            return Err(AppError::UnknownColumn(label.clone()));
        }
        if !seen.insert(label.as_str()) {
            return Err(AppError::RepeatedColumn(label.clone()));
        }
    }
    let tolerances = config.tolerances()?;

    let used: Vec<String> = [config.response.clone(), config.explanatory.clone()]
        .into_iter()
        .chain(config.controls.iter().cloned())
        .chain(candidates.iter().cloned())
        .collect();
    let mut data = pick_all(data, &used)?;
    if config.standardize {
        data = data::standardize(&data)?;
    }
    let y = pick(&data, &config.response)?;
    let x = pick(&data, &config.explanatory)?;
    let w = pick_all(&data, &config.controls)?;
    let u = pick_all(&data, &candidates)?;

    let problem = RegressionProblem::with_checks(y.clone(), x.clone(), w.clone(), u.clone(), Checks::Design)?
        .with_tolerances(tolerances);
    let diagnostics = diagnose(&problem)?;

    let (subset_report, subsets_skipped) = match subset_count(&problem, config.subset_ceiling) {
        Ok(count) => (Some(enumerate_parallel(&problem, count)?), None),
        Err(reversal_core::Error::SubsetCeilingExceeded { k, ceiling }) => (
            None,
            Some(format!("{k} candidates exceed the enumeration ceiling of {ceiling}")),
        ),
        Err(e) => return Err(e.into()),
    };

    let per_candidate_partials = candidate_partials(&y, &x, &w, &u, config.partials_include_explanatory)?;

    let base = DataMatrix::new(vec![x.clone()])?.concat(&w)?;
    let context_fits = vec![
        ContextFit { name: "baseline".into(), rows: coefficient_table(&y, &base)? },
        ContextFit { name: "adjusted".into(), rows: coefficient_table(&y, &base.concat(&u)?)? },
    ];

    let narrative_verdict = narrative(&diagnostics, &config.explanatory, subset_report.as_ref());
    Ok(Report {
        response: config.response.clone(),
        explanatory: config.explanatory.clone(),
        controls: config.controls.clone(),
        candidates,
        standardized: config.standardize,
        diagnostics,
        subset_report,
        subsets_skipped,
        per_candidate_partials,
        narrative_verdict,
        context_fits,
    })
}

/// Evaluates every subset concurrently; the assembled report does not depend
/// on evaluation order.
pub fn enumerate_parallel(problem: &RegressionProblem, count: u64) -> Result<SubsetReport> {
    let outcomes = (0..count)
        .into_par_iter()
        .map(|m| evaluate_subset(problem, SubsetId(m)))
        .collect::<Result<Vec<_>, _>>()?;
    let labels = problem.u().labels().map(str::to_owned).collect();
    Ok(SubsetReport::from_outcomes(labels, outcomes))
}

fn candidate_partials(
    y: &DataColumn,
    x: &DataColumn,
    w: &DataMatrix,
    u: &DataMatrix,
    include_explanatory: bool,
) -> Result<Vec<(String, f64)>> {
    (0..u.ncols())
        .map(|j| {
            let mut given = w.clone();
            if include_explanatory {
                given.push(x.clone())?;
            }
            for (i, c) in u.iter().enumerate() {
                if i != j {
                    given.push(c.clone())?;
                }
            }
            let c = &u.columns()[j];
            Ok((c.label().to_owned(), partial_corr(c, y, &given)?))
        })
        .collect()
}

/// One-sentence reading of the verdict.
pub fn narrative(d: &ReversalDiagnostics, explanatory: &str, subsets: Option<&SubsetReport>) -> String {
    match d.verdict {
        Verdict::ReversalCertain => format!(
            "Reversal: adjusting for all candidates changes the sign of the {explanatory} coefficient \
             (ratio {:.4} > 1).",
            d.reversal_ratio
        ),
        Verdict::StableByProductBound => format!(
            "Stable: no subset of the candidates can reverse the sign of the {explanatory} coefficient, \
             since R(u,x)*R(u,y) = {:.4} < |r| = {:.4}.",
            d.multiple_r_ux * d.multiple_r_uy,
            d.partial_r.abs()
        ),
        Verdict::StableByAxisBound => format!(
            "Stable: no subset of the candidates can reverse the sign of the {explanatory} coefficient, \
             since R^2(u,v) = {:.4} < r* = {:.4}.",
            d.r2_u_v, d.r_star
        ),
        Verdict::Indeterminate => {
            let tail = match subsets {
                Some(s) if s.any_reversal => {
                    format!(" Enumeration found {} reversing subsets.", s.flipping_subsets.len())
                }
                Some(_) => " Enumeration found no reversing subset.".into(),
                None => String::new(),
            };
            format!(
                "Indeterminate: the full adjustment keeps the sign of the {explanatory} coefficient \
                 but neither bound rules out a reversal by some subset.{tail}"
            )
        }
    }
}
