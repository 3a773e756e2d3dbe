//! JSON and plain-text rendering of a [`Report`].

use std::fmt::Write as _;

use reversal_core::linalg::CoefficientRow;
use reversal_core::reversal::Verdict;
use serde::{Deserialize, Serialize};

use crate::analysis::Report;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "json" => Ok(Format::Json),
            "text" => Ok(Format::Text),
            _ => Err(format!("unknown format {s:?}; expected json or text")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubsetSummary {
    pub count: u64,
    pub flipped: usize,
    pub flipped_list: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartialRow {
    pub label: String,
    pub partial_r: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermRow {
    pub label: String,
    pub estimate: f64,
    /// Absent when the fit has no residual degrees of freedom.
    pub std_error: Option<f64>,
    pub t_statistic: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContextTable {
    pub name: String,
    pub rows: Vec<TermRow>,
}

/// Wire format of a report. Field names are fixed.
#[allow(non_snake_case)]
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub response: String,
    pub explanatory: String,
    pub controls: Vec<String>,
    pub candidates: Vec<String>,
    pub standardized: bool,
    pub baseline_sign: String,
    pub adjusted_sign: String,
    pub prop1_ratio: f64,
    pub r_partial: f64,
    pub R_ux: f64,
    pub R_uy: f64,
    pub fitted_corr: f64,
    pub r_star: f64,
    pub R2_u_v: f64,
    pub verdict: String,
    pub beta_unadjusted: f64,
    pub beta_adjusted: f64,
    pub product_bound_stable: bool,
    pub axis_bound_stable: bool,
    pub subsets: Option<SubsetSummary>,
    pub subsets_skipped: Option<String>,
    pub partial_table: Vec<PartialRow>,
    pub narrative_verdict: String,
    pub context_fits: Vec<ContextTable>,
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

fn term(row: &CoefficientRow) -> TermRow {
    TermRow {
        label: row.label.clone(),
        estimate: row.estimate,
        std_error: finite(row.std_error),
        t_statistic: finite(row.t_statistic),
    }
}

impl From<&Report> for ReportDocument {
    fn from(r: &Report) -> Self {
        let d = &r.diagnostics;
        let subsets = r.subset_report.as_ref().map(|s| SubsetSummary {
            count: s.outcomes.len() as u64,
            flipped: s.flipping_subsets.len(),
            flipped_list: s
                .flipping_subsets
                .iter()
                .map(|id| id.labels(&s.candidates).into_iter().map(str::to_owned).collect())
                .collect(),
        });
        ReportDocument {
            response: r.response.clone(),
            explanatory: r.explanatory.clone(),
            controls: r.controls.clone(),
            candidates: r.candidates.clone(),
            standardized: r.standardized,
            baseline_sign: d.sign_unadjusted.as_str().into(),
            adjusted_sign: d.sign_adjusted.as_str().into(),
            prop1_ratio: d.reversal_ratio,
            r_partial: d.partial_r,
            R_ux: d.multiple_r_ux,
            R_uy: d.multiple_r_uy,
            fitted_corr: d.fitted_corr,
            r_star: d.r_star,
            R2_u_v: d.r2_u_v,
            verdict: d.verdict.as_str().into(),
            beta_unadjusted: d.beta_unadjusted,
            beta_adjusted: d.beta_adjusted,
            product_bound_stable: d.product_bound,
            axis_bound_stable: d.axis_bound,
            subsets,
            subsets_skipped: r.subsets_skipped.clone(),
            partial_table: r
                .per_candidate_partials
                .iter()
                .map(|(label, partial_r)| PartialRow { label: label.clone(), partial_r: *partial_r })
                .collect(),
            narrative_verdict: r.narrative_verdict.clone(),
            context_fits: r
                .context_fits
                .iter()
                .map(|f| ContextTable { name: f.name.clone(), rows: f.rows.iter().map(term).collect() })
                .collect(),
        }
    }
}

pub fn emit_report(report: &Report, format: Format) -> Vec<u8> {
    match format {
        Format::Json => {
            let mut out = serde_json::to_vec_pretty(&ReportDocument::from(report)).expect("serializable");
            out.push(b'\n');
            out
        }
        Format::Text => render_text(report).into_bytes(),
    }
}

fn list(items: &[String]) -> String {
    if items.is_empty() {
        "(none)".into()
    } else {
        items.join(", ")
    }
}

fn holds(b: bool) -> &'static str {
    if b {
        "holds"
    } else {
        "fails"
    }
}

fn render_text(r: &Report) -> String {
    let d = &r.diagnostics;
    let mut s = String::new();
    let _ = writeln!(s, "response     {}", r.response);
    let _ = writeln!(s, "explanatory  {}", r.explanatory);
    let _ = writeln!(s, "controls     {}", list(&r.controls));
    let _ = writeln!(s, "candidates   {}", list(&r.candidates));
    let _ = writeln!(s, "standardized {}", if r.standardized { "yes" } else { "no" });
    s.push('\n');
    let scalars = [
        ("r(x,y|w)", d.partial_r),
        ("R(u,x)", d.multiple_r_ux),
        ("R(u,y)", d.multiple_r_uy),
        ("R(u,x)*R(u,y)", d.multiple_r_ux * d.multiple_r_uy),
        ("fitted corr", d.fitted_corr),
        ("reversal ratio", d.reversal_ratio),
        ("r*", d.r_star),
        ("R^2(u,v)", d.r2_u_v),
        ("beta unadjusted", d.beta_unadjusted),
        ("beta adjusted", d.beta_adjusted),
    ];
    for (name, v) in scalars {
        let _ = writeln!(s, "{name:<18}{v:>10.4}");
    }
    let _ = writeln!(s, "{:<18}{:>10}", "baseline sign", d.sign_unadjusted.as_str());
    let _ = writeln!(s, "{:<18}{:>10}", "adjusted sign", d.sign_adjusted.as_str());
    let _ = writeln!(s, "{:<18}{:>10}", "product bound", holds(d.product_bound));
    let _ = writeln!(s, "{:<18}{:>10}", "axis bound", holds(d.axis_bound));
    let _ = writeln!(s, "verdict           {}", d.verdict.as_str());
    s.push('\n');
    let _ = writeln!(s, "{}", r.narrative_verdict);
    if d.verdict == Verdict::ReversalCertain {
        let _ = writeln!(
            s,
            "Flipping evidence: the {} coefficient moves from {:.4} ({}) to {:.4} ({}) after adjusting for {}.",
            r.explanatory,
            d.beta_unadjusted,
            d.sign_unadjusted.as_str(),
            d.beta_adjusted,
            d.sign_adjusted.as_str(),
            list(&r.candidates)
        );
    }
    s.push('\n');
    match (&r.subset_report, &r.subsets_skipped) {
        (Some(sr), _) => {
            let _ = writeln!(
                s,
                "subsets: {} evaluated, {} reverse the sign",
                sr.outcomes.len(),
                sr.flipping_subsets.len()
            );
            for id in &sr.flipping_subsets {
                let _ = writeln!(s, "  {{{}}}", id.labels(&sr.candidates).join(", "));
            }
        }
        (None, Some(reason)) => {
            let _ = writeln!(s, "subsets: not enumerated ({reason})");
        }
        (None, None) => {}
    }
    s.push('\n');
    let _ = writeln!(s, "partial correlation with {} given the other candidates", r.response);
    for (label, p) in &r.per_candidate_partials {
        let _ = writeln!(s, "  {label:<16}{p:>10.4}");
    }
    for fit in &r.context_fits {
        s.push('\n');
        let _ = writeln!(s, "context fit ({}); t statistics are descriptive, not part of the verdict", fit.name);
        let _ = writeln!(s, "  {:<16}{:>10}{:>10}", "term", "estimate", "t");
        for row in &fit.rows {
            let t = if row.t_statistic.is_finite() { format!("{:.2}", row.t_statistic) } else { "-".into() };
            let _ = writeln!(s, "  {:<16}{:>10.2}{:>10}", row.label, row.estimate, t);
        }
    }
    s
}
