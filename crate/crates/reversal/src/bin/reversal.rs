use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use reversal::analysis::{enumerate_parallel, AnalysisConfig};
use reversal::report::{emit_report, Format};
use reversal::{analysis, data, synthetic, AppError};
use reversal_core::cone::{sample_boundary, ConeSpec};
use reversal_core::counterexamples::{generate, Family};
use reversal_core::reversal::{Checks, RegressionProblem};
use reversal_core::simpson::{necessary_condition_strong, necessary_condition_weak, reversal_check, simpson_check};
use reversal_core::subsets::{subset_count, DEFAULT_SUBSET_CEILING};
use serde_json::json;

/// Sign-reversal sensitivity analysis for least-squares coefficients.
#[derive(Parser)]
#[command(name = "reversal", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether adjusting for candidate covariates can reverse the sign of a coefficient.
    Diagnose(AnalysisArgs),
    /// Fit every subset of the candidates and list the sign of the coefficient in each.
    Enumerate(AnalysisArgs),
    /// Check a two-population categorical study for Simpson's paradox and reversal.
    Simpson {
        /// Long-format CSV with columns population, category, outcome.
        #[arg(long)]
        input: PathBuf,
        /// Value marking category membership in the indicator columns.
        #[arg(long, default_value_t = 1.0)]
        membership: f64,
        #[arg(long, default_value = "text")]
        format: Format,
    },
    /// Reversal cone utilities.
    Cone {
        #[command(subcommand)]
        command: ConeCommand,
    },
    /// Print a counterexample instance (need-r2, need-partial, no-full-fitted-corr).
    Counterexample {
        family: String,
        #[arg(long, default_value_t = 1e-3)]
        epsilon: f64,
        #[arg(long, default_value_t = 1e-3)]
        delta: f64,
        /// text prints the instance as CSV.
        #[arg(long, default_value = "text")]
        format: Format,
    },
    /// Write the synthetic diet dataset as CSV.
    Synthetic {
        #[arg(long, default_value_t = synthetic::SYNTHETIC_SEED)]
        seed: u64,
        /// Output file; standard output when absent.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum ConeCommand {
    /// Sample directions on the cone boundary in canonical coordinates.
    Sample {
        /// Correlation between x and y, in (0, 1).
        #[arg(long)]
        r: f64,
        /// Dimension of the residual space (at least 3).
        #[arg(long, default_value_t = 3)]
        dim: usize,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// text prints the points as CSV.
        #[arg(long, default_value = "text")]
        format: Format,
    },
}

#[derive(Args)]
struct AnalysisArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    response: String,
    #[arg(long)]
    explanatory: String,
    /// Baseline controls present in every model.
    #[arg(long, value_delimiter = ',')]
    controls: Vec<String>,
    /// Candidate covariates; defaults to every other column.
    #[arg(long, value_delimiter = ',')]
    candidates: Vec<String>,
    /// Center and scale every used column to unit sample standard deviation.
    #[arg(long)]
    standardize: bool,
    #[arg(long, default_value = "text")]
    format: Format,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_SUBSET_CEILING)]
    subset_ceiling: usize,
    /// Override a numerical tolerance, e.g. sign=1e-8 (repeatable).
    #[arg(long = "tolerance", value_parser = parse_override)]
    tolerances: Vec<(String, f64)>,
    /// Also condition the candidate partial correlations on the explanatory column.
    #[arg(long)]
    partials_include_explanatory: bool,
}

fn parse_override(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or("expected key=value")?;
    let v: f64 = v.parse().map_err(|_| format!("not a number: {v:?}"))?;
    Ok((k.to_owned(), v))
}

impl AnalysisArgs {
    fn config(&self) -> AnalysisConfig {
        let mut c = AnalysisConfig::new(&self.input, &self.response, &self.explanatory);
        c.controls = self.controls.clone();
        c.candidates = self.candidates.clone();
        c.standardize = self.standardize;
        c.subset_ceiling = self.subset_ceiling;
        c.seed = self.seed;
        c.partials_include_explanatory = self.partials_include_explanatory;
        if !self.tolerances.is_empty() {
            c.tolerance_overrides = Some(self.tolerances.iter().cloned().collect::<BTreeMap<_, _>>());
        }
        c
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = Vec::new();
    match run(cli.command, &mut out) {
        Ok(()) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(&out).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(2);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn to_json(value: &serde_json::Value) -> Vec<u8> {
    let mut v = serde_json::to_vec_pretty(value).expect("serializable");
    v.push(b'\n');
    v
}

fn run(command: Command, out: &mut Vec<u8>) -> Result<(), AppError> {
    match command {
        Command::Diagnose(args) => {
            let report = analysis::run_analysis(&args.config())?;
            out.extend(emit_report(&report, args.format));
        }
        Command::Enumerate(args) => enumerate(&args, out)?,
        Command::Simpson { input, membership, format } => {
            let (study, labels) = data::load_study_csv(&input)?;
            let study = study.with_membership_value(membership)?;
            let cells = study.cell_means()?;
            let simpson = simpson_check(&study)?;
            let reversal = reversal_check(&study)?;
            let strong = necessary_condition_strong(&study)?;
            let weak = necessary_condition_weak(&study)?;
            let overall = [study.overall_mean(0), study.overall_mean(1)];
            match format {
                Format::Json => out.extend(to_json(&json!({
                    "categories": labels,
                    "cell_means": cells.iter().zip(&labels).map(|(c, l)| json!({
                        "category": l, "population_0": c[0], "population_1": c[1],
                    })).collect::<Vec<_>>(),
                    "overall_means": overall,
                    "simpson": simpson,
                    "reversal": reversal,
                    "necessary_strong": strong,
                    "necessary_weak": weak,
                }))),
                Format::Text => {
                    let mut s = format!("{:<16}{:>14}{:>14}\n", "category", "population 0", "population 1");
                    for (c, l) in cells.iter().zip(&labels) {
                        s += &format!("{l:<16}{:>14.4}{:>14.4}\n", c[0], c[1]);
                    }
                    let o = overall.map(|v| v.unwrap_or(f64::NAN));
                    s += &format!("{:<16}{:>14.4}{:>14.4}\n\n", "overall", o[0], o[1]);
                    s += &format!("simpson's paradox      {simpson}\n");
                    s += &format!("coefficient reversal   {reversal}\n");
                    s += &format!("R(u,x)R(u,y) > |r|     {strong}\n");
                    s += &format!("R^2(u,v) > r*          {weak}\n");
                    out.extend(s.into_bytes());
                }
            }
        }
        Command::Cone { command: ConeCommand::Sample { r, dim, count, seed, format } } => {
            let spec = ConeSpec::new(r, dim)?;
            let points = sample_boundary(&spec, count, seed);
            match format {
                Format::Json => {
                    let (a1, rest) = spec.coefficients();
                    out.extend(to_json(&json!({
                        "r": r, "dim": dim, "seed": seed,
                        "axis": spec.axis(),
                        "coefficients": {"first": a1, "rest": rest},
                        "points": points,
                    })))
                }
                Format::Text => {
                    let header: Vec<String> = (1..=dim).map(|i| format!("c{i}")).collect();
                    let mut s = header.join(",") + "\n";
                    for p in &points {
                        s += &p.iter().map(f64::to_string).collect::<Vec<_>>().join(",");
                        s.push('\n');
                    }
                    out.extend(s.into_bytes());
                }
            }
        }
        Command::Counterexample { family, epsilon, delta, format } => {
            let fam = Family::parse(&family).ok_or_else(|| {
                let names: Vec<&str> = Family::ALL.iter().map(|f| f.as_str()).collect();
                AppError::Config(format!("unknown family {family:?}; expected one of {}", names.join(", ")))
            })?;
            let inst = generate(fam, epsilon, delta)?;
            match format {
                Format::Json => out.extend(to_json(&json!({
                    "family": fam.as_str(),
                    "epsilon": inst.epsilon,
                    "delta": inst.delta,
                    "columns": inst.data.labels().collect::<Vec<_>>(),
                    "rows": reversal_core::counterexamples::rows(&inst),
                    "expected_limits": inst.expected,
                }))),
                Format::Text => data::write_csv(&inst.data, &mut *out)?,
            }
        }
        Command::Synthetic { seed, output } => {
            let text = synthetic::synthetic_csv(seed);
            match output {
                Some(path) => std::fs::write(&path, text).map_err(|source| AppError::Io { path, source })?,
                None => out.extend(text.into_bytes()),
            }
        }
    }
    Ok(())
}

fn enumerate(args: &AnalysisArgs, out: &mut Vec<u8>) -> Result<(), AppError> {
    let config = args.config();
    let mut matrix = data::load_csv(&config.input_path)?;
    let candidates = config.resolved_candidates(&matrix);
    if config.standardize {
        matrix = data::standardize(&matrix)?;
    }
    let col = |l: &String| matrix.column(l).cloned().ok_or_else(|| AppError::UnknownColumn(l.clone()));
    let cols = |ls: &[String]| -> Result<_, AppError> {
        Ok(reversal_core::linalg::DataMatrix::new(ls.iter().map(col).collect::<Result<Vec<_>, _>>()?)?)
    };
    let problem = RegressionProblem::with_checks(
        col(&config.response)?,
        col(&config.explanatory)?,
        cols(&config.controls)?,
        cols(&candidates)?,
        Checks::Design,
    )?
    .with_tolerances(config.tolerances()?);
    let count = subset_count(&problem, config.subset_ceiling)?;
    let report = enumerate_parallel(&problem, count)?;
    let base = report.baseline_sign();
    match args.format {
        Format::Json => out.extend(to_json(&json!({
            "candidates": report.candidates,
            "baseline_sign": base.as_str(),
            "count": report.outcomes.len(),
            "any_reversal": report.any_reversal,
            "outcomes": report.outcomes.iter().map(|o| json!({
                "subset": o.subset.labels(&report.candidates),
                "coefficient": o.coefficient,
                "sign": o.sign.as_str(),
                "flipped": o.sign != base,
            })).collect::<Vec<_>>(),
        }))),
        Format::Text => {
            let mut s = format!("{:<40}{:>14}{:>15}\n", "subset", "coefficient", "sign");
            for o in &report.outcomes {
                let labels = format!("{{{}}}", o.subset.labels(&report.candidates).join(", "));
                let mark = if o.sign != base { "  *" } else { "" };
                s += &format!("{labels:<40}{:>14.4}{:>15}{mark}\n", o.coefficient, o.sign.as_str());
            }
            s += &format!("\n{} of {} subsets reverse the sign (*)\n", report.flipping_subsets.len(), report.outcomes.len());
            out.extend(s.into_bytes());
        }
    }
    Ok(())
}
