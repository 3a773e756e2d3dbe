#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use reversal_core::linalg::{DataColumn, DataMatrix};
use reversal_core::reversal::RegressionProblem;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

pub fn column(label: &str, values: Vec<f64>) -> DataColumn {
    DataColumn::new(label, values).unwrap()
}

pub fn normal_matrix(rng: &mut ChaCha8Rng, prefix: &str, n: usize, k: usize) -> DataMatrix {
    DataMatrix::new((0..k).map(|i| column(&format!("{prefix}{}", i + 1), normal_vec(rng, n))).collect()).unwrap()
}

/// Random problem with standard-normal entries.
pub fn random_problem(rng: &mut ChaCha8Rng, n: usize, p: usize, k: usize) -> RegressionProblem {
    loop {
        let y = column("y", normal_vec(rng, n));
        let x = column("x", normal_vec(rng, n));
        let w = normal_matrix(rng, "w", n, p);
        let u = normal_matrix(rng, "u", n, k);
        if let Ok(problem) = RegressionProblem::new(y, x, w, u) {
            return problem;
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Least squares by the normal equations and Gaussian elimination with
/// partial pivoting. Intercept first when `intercept` is set.
pub fn normal_equations(z: &[f64], regressors: &[&[f64]], intercept: bool) -> Vec<f64> {
    let ones = vec![1.0; z.len()];
    let mut cols: Vec<&[f64]> = Vec::new();
    if intercept {
        cols.push(&ones);
    }
    cols.extend_from_slice(regressors);
    let p = cols.len();
    let mut a: Vec<Vec<f64>> = (0..p)
        .map(|i| {
            let mut row: Vec<f64> = (0..p).map(|j| dot(cols[i], cols[j])).collect();
            row.push(dot(cols[i], z));
            row
        })
        .collect();
    for c in 0..p {
        let pivot = (c..p).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap();
        a.swap(c, pivot);
        for r in c + 1..p {
            let f = a[r][c] / a[c][c];
            for k in c..=p {
                a[r][k] -= f * a[c][k];
            }
        }
    }
    let mut beta = vec![0.0; p];
    for i in (0..p).rev() {
        let s: f64 = (i + 1..p).map(|j| a[i][j] * beta[j]).sum();
        beta[i] = (a[i][p] - s) / a[i][i];
    }
    beta
}

/// Coefficient of `x` in the fit of `y` on `[e x W s]` via the normal equations.
pub fn oracle_coefficient(problem: &RegressionProblem, mask: u64) -> f64 {
    let mut regs: Vec<&[f64]> = vec![problem.x().values()];
    regs.extend(problem.w().iter().map(|c| c.values()));
    regs.extend(
        problem
            .u()
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, c)| c.values()),
    );
    normal_equations(problem.y().values(), &regs, true)[1]
}

/// True when some subset of `U` changes the sign of the coefficient of `x`,
/// by brute force over all masks with the normal-equations oracle.
pub fn oracle_any_flip(problem: &RegressionProblem) -> bool {
    let base = oracle_coefficient(problem, 0).signum();
    (1..1u64 << problem.k()).any(|m| oracle_coefficient(problem, m).signum() != base)
}
