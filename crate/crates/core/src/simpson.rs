//! Two-population categorical studies: Simpson's paradox, coefficient
//! reversal, and the two necessary conditions for the paradox.
//!
//! `x` indicates the population (0 or 1), `y` the incidence, and the `q`
//! categories are encoded as `q - 1` indicator columns with the last category
//! as the reference cell.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{DataColumn, DataMatrix};
use crate::reversal::{aligned_axis, Checks, RegressionProblem, Sign, Tolerances};
use crate::stats;

#[derive(Clone, Debug, PartialEq)]
pub struct CategoricalStudy {
    population: Vec<u8>,
    outcome: Vec<f64>,
    /// Compact category index per row, `0..num_categories`.
    category: Vec<usize>,
    num_categories: usize,
    membership: f64,
}

impl CategoricalStudy {
    /// `category` holds arbitrary codes; they are renumbered in ascending order.
    pub fn new(population: Vec<u8>, category: Vec<usize>, outcome: Vec<f64>) -> Result<Self> {
        let n = population.len();
        if category.len() != n || outcome.len() != n {
            return Err(Error::InvalidStudy("population, category and outcome lengths differ"));
        }
        if n < 2 {
            return Err(Error::InvalidStudy("fewer than two observations"));
        }
        if population.iter().any(|&p| p > 1) {
            return Err(Error::InvalidStudy("population indicator must be 0 or 1"));
        }
        if outcome.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidStudy("non-finite outcome"));
        }
        let mut codes = category.clone();
        codes.sort_unstable();
        codes.dedup();
        let category = category
            .iter()
            .map(|c| codes.binary_search(c).expect("code present"))
            .collect();
        Ok(Self { population, outcome, category, num_categories: codes.len(), membership: 1.0 })
    }

    /// Uses `value` instead of 1 to mark category membership in the indicators.
    pub fn with_membership_value(mut self, value: f64) -> Result<Self> {
        if value == 0.0 || !value.is_finite() {
            return Err(Error::Domain { what: "membership value", value });
        }
        self.membership = value;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.population.len()
    }

    pub fn is_empty(&self) -> bool {
        self.population.is_empty()
    }

    pub fn num_categories(&self) -> usize {
        self.num_categories
    }

    pub fn x(&self) -> DataColumn {
        DataColumn::new("x", self.population.iter().map(|&p| f64::from(p)).collect()).expect("validated")
    }

    pub fn y(&self) -> DataColumn {
        DataColumn::new("y", self.outcome.clone()).expect("validated")
    }

    /// `q - 1` indicator columns; the last category is the reference cell.
    pub fn indicators(&self) -> DataMatrix {
        let cols = (0..self.num_categories.saturating_sub(1))
            .map(|j| {
                let values = self.category.iter().map(|&c| if c == j { self.membership } else { 0.0 }).collect();
                DataColumn::new(format!("u{}", j + 1), values).expect("validated")
            })
            .collect();
        DataMatrix::new(cols).expect("unique labels")
    }

    fn mean_where(&self, keep: impl Fn(usize) -> bool) -> Option<f64> {
        let (sum, count) = (0..self.len())
            .filter(|&i| keep(i))
            .fold((0.0, 0usize), |(s, c), i| (s + self.outcome[i], c + 1));
        (count > 0).then(|| sum / count as f64)
    }

    /// Mean outcome of population `population` within category `category`.
    pub fn cell_mean(&self, category: usize, population: u8) -> Option<f64> {
        self.mean_where(|i| self.category[i] == category && self.population[i] == population)
    }

    /// `[mean for population 0, mean for population 1]` per category.
    pub fn cell_means(&self) -> Result<Vec<[f64; 2]>> {
        (0..self.num_categories)
            .map(|j| {
                let m0 = self.cell_mean(j, 0).ok_or(Error::EmptyCell { category: j, population: 0 })?;
                let m1 = self.cell_mean(j, 1).ok_or(Error::EmptyCell { category: j, population: 1 })?;
                Ok([m0, m1])
            })
            .collect()
    }

    pub fn overall_mean(&self, population: u8) -> Option<f64> {
        self.mean_where(|i| self.population[i] == population)
    }

    fn problem(&self) -> Result<RegressionProblem> {
        RegressionProblem::with_checks(self.y(), self.x(), DataMatrix::empty(), self.indicators(), Checks::Relaxed)
    }
}

/// True when the population with strictly higher overall incidence has
/// strictly lower incidence in every category.
pub fn simpson_check(study: &CategoricalStudy) -> Result<bool> {
    let cells = study.cell_means()?;
    let o0 = study.overall_mean(0).ok_or(Error::EmptyCell { category: 0, population: 0 })?;
    let o1 = study.overall_mean(1).ok_or(Error::EmptyCell { category: 0, population: 1 })?;
    if o0 == o1 {
        return Ok(false);
    }
    let (hi, lo) = if o1 > o0 { (1, 0) } else { (0, 1) };
    Ok(cells.iter().all(|c| c[hi] < c[lo]))
}

/// True when adjusting for the category indicators changes the sign of the
/// population coefficient.
pub fn reversal_check(study: &CategoricalStudy) -> Result<bool> {
    if study.num_categories < 2 {
        return Ok(false);
    }
    let problem = study.problem()?;
    let all = (1u64 << problem.k()) - 1;
    let unadjusted = problem.coefficient_with(0)?;
    let adjusted = problem.coefficient_with(all)?;
    let x = study.x();
    let y = study.y();
    // surfaces ZeroVariance for a single population or a constant outcome
    stats::corr(&x, &y)?;
    let threshold = Tolerances::default().sign * (centered_norm(&y) / centered_norm(&x));
    let (a, b) = (Sign::of(unadjusted, threshold), Sign::of(adjusted, threshold));
    if a == Sign::Indeterminate || b == Sign::Indeterminate {
        return Err(Error::DegenerateBaseline);
    }
    Ok(a != b)
}

fn centered_norm(c: &DataColumn) -> f64 {
    crate::linalg::center(c).norm()
}

/// `R(u, x) R(u, y) > |r(x, y)|`. `false` rules Simpson's paradox out.
pub fn necessary_condition_strong(study: &CategoricalStudy) -> Result<bool> {
    let (x, y) = (study.x(), study.y());
    let r = stats::corr(&x, &y)?;
    if study.num_categories < 2 {
        return Ok(false);
    }
    let u = study.indicators();
    let rux = libm::sqrt(stats::coef_determination(&u, &x)?);
    let ruy = libm::sqrt(stats::coef_determination(&u, &y)?);
    Ok(rux * ruy > libm::fabs(r))
}

/// `R^2(u, v) > r*`, with `x` negated first when `r(x, y) < 0`. `false` rules
/// Simpson's paradox out.
pub fn necessary_condition_weak(study: &CategoricalStudy) -> Result<bool> {
    let (x, y) = (study.x(), study.y());
    let r = stats::corr(&x, &y)?;
    if libm::fabs(r) < Tolerances::default().baseline {
        return Err(Error::DegenerateBaseline);
    }
    if study.num_categories < 2 {
        return Ok(false);
    }
    let (v, r_star) = aligned_axis(&crate::linalg::center(&x), &crate::linalg::center(&y), r)?;
    let r2 = stats::coef_determination(&study.indicators(), &v)?;
    Ok(r2 > r_star)
}

/// Expands an incidence table into a binary-outcome study. `cells[j][i]` is
/// `(positives, total)` for category `j` and population `i`.
pub fn study_from_counts(cells: &[[(usize, usize); 2]]) -> Result<CategoricalStudy> {
    let mut population = Vec::new();
    let mut category = Vec::new();
    let mut outcome = Vec::new();
    for (j, cell) in cells.iter().enumerate() {
        for (i, &(pos, total)) in cell.iter().enumerate() {
            if pos > total {
                return Err(Error::InvalidStudy("more positives than observations"));
            }
            population.extend(vec![i as u8; total]);
            category.extend(vec![j; total]);
            outcome.extend((0..total).map(|t| if t < pos { 1.0 } else { 0.0 }));
        }
    }
    CategoricalStudy::new(population, category, outcome)
}

/// Seeded random incidence table with `categories` categories.
///
/// Half of the draws steer the populations toward opposite ends of the
/// category base rates while giving population 1 the lower within-category
/// rate, which makes the paradox common; the rest are unstructured.
pub fn random_study(seed: u64, categories: usize) -> Result<CategoricalStudy> {
    use rand::{Rng, SeedableRng};
    if categories == 0 {
        return Err(Error::InvalidStudy("no categories"));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let steered = rng.random_bool(0.5);
    let mut bases: Vec<f64> = (0..categories).map(|_| rng.random_range(0.05..0.95)).collect();
    if steered {
        // population 1 leans toward the high-rate categories
        bases.sort_by(f64::total_cmp);
    }
    let mut cells = Vec::with_capacity(categories);
    for (j, &base) in bases.iter().enumerate() {
        let cell = if steered {
            let gap: f64 = rng.random_range(0.01..0.2);
            let share = (j as f64 + 0.5) / categories as f64;
            let n1 = 5 + (rng.random_range(0.0..120.0) * share) as usize;
            let n0 = 5 + (rng.random_range(0.0..120.0) * (1.0 - share)) as usize;
            [rate_cell(libm::fmin(base + gap, 1.0), n0), rate_cell(base, n1)]
        } else {
            let n0 = rng.random_range(5..80);
            let n1 = rng.random_range(5..80);
            [rate_cell(rng.random_range(0.0..1.0), n0), rate_cell(rng.random_range(0.0..1.0), n1)]
        };
        cells.push(cell);
    }
    study_from_counts(&cells)
}

fn rate_cell(rate: f64, total: usize) -> (usize, usize) {
    ((libm::round(rate * total as f64) as usize).min(total), total)
}
