//! Seeded stand-in for country-level diet and health data: one dominant
//! development index and five consumption covariates that track it.
//!
//! Construction, per row:
//!
//! - latent development `z ~ N(0, 1)`;
//! - `hdi = 0.25 + 0.7 / (1 + exp(-1.3 z))`, three decimals;
//! - each covariate is `a + b (l z + sqrt(1 - l^2) e)` with its own noise `e`
//!   and loading `l` (meat 0.8, milk 0.7, eggs 0.75, fish 0.35, animal fat
//!   0.6), floored at a small positive value, one decimal;
//! - `cholesterol = 4.6 + 1.125 (hdi - 0.6) + 0.02 s + 0.07 e`, two decimals,
//!   where `s` is the unscaled meat signal `l z + sqrt(1 - l^2) e`.
//!
//! The bundled file `data/synthetic_diet.csv` is `synthetic_csv(SYNTHETIC_SEED)`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use reversal_core::linalg::{DataColumn, DataMatrix};

pub const SYNTHETIC_ROWS: usize = 155;
pub const SYNTHETIC_SEED: u64 = 2008;
pub const RESPONSE: &str = "cholesterol";
pub const EXPLANATORY: &str = "hdi";
pub const COVARIATES: [&str; 5] = ["meat", "milk", "eggs", "fish", "animal_fat"];

/// (label, loading, center, spread, floor)
const DIET: [(&str, f64, f64, f64, f64); 5] = [
    ("meat", 0.8, 45.0, 28.0, 2.0),
    ("milk", 0.7, 110.0, 70.0, 5.0),
    ("eggs", 0.75, 8.0, 5.0, 0.3),
    ("fish", 0.35, 17.0, 12.0, 0.5),
    ("animal_fat", 0.6, 3.5, 2.5, 0.1),
];

fn round_to(v: f64, places: i32) -> f64 {
    let s = 10f64.powi(places);
    (v * s).round() / s
}

/// Rows of `[cholesterol, hdi, meat, milk, eggs, fish, animal_fat]`.
fn rows(seed: u64) -> Vec<[f64; 7]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut normal = move || -> f64 { StandardNormal.sample(&mut rng) };
    (0..SYNTHETIC_ROWS)
        .map(|_| {
            let z = normal();
            let hdi = round_to(0.25 + 0.7 / (1.0 + (-1.3 * z).exp()), 3);
            let mut row = [0.0; 7];
            row[1] = hdi;
            let mut meat_signal = 0.0;
            for (j, (_, l, a, b, floor)) in DIET.iter().enumerate() {
                let signal = l * z + (1.0 - l * l).sqrt() * normal();
                if j == 0 {
                    meat_signal = signal;
                }
                row[j + 2] = round_to((a + b * signal).max(*floor), 1);
            }
            let chol = 4.6 + 1.125 * (hdi - 0.6) + 0.02 * meat_signal + 0.07 * normal();
            row[0] = round_to(chol, 2);
            row
        })
        .collect()
}

/// The dataset as CSV text with fixed decimal places.
pub fn synthetic_csv(seed: u64) -> String {
    let mut out = String::from("cholesterol,hdi,meat,milk,eggs,fish,animal_fat\n");
    for r in rows(seed) {
        out.push_str(&format!(
            "{:.2},{:.3},{:.1},{:.1},{:.1},{:.1},{:.1}\n",
            r[0], r[1], r[2], r[3], r[4], r[5], r[6]
        ));
    }
    out
}

/// The dataset as labeled columns.
pub fn synthetic_dataset(seed: u64) -> DataMatrix {
    let rows = rows(seed);
    let labels = [RESPONSE, EXPLANATORY].into_iter().chain(COVARIATES);
    let columns = labels
        .enumerate()
        .map(|(j, l)| DataColumn::new(l, rows.iter().map(|r| r[j]).collect()).expect("finite"))
        .collect();
    DataMatrix::new(columns).expect("distinct labels")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::path::Path;

    #[test]
    fn csv_and_columns_agree() {
        let text = synthetic_csv(SYNTHETIC_SEED);
        let parsed = crate::data::parse_csv(text.as_bytes(), Path::new("synthetic")).unwrap();
        assert_eq!(parsed, synthetic_dataset(SYNTHETIC_SEED));
        assert_eq!(parsed.nrows(), Some(SYNTHETIC_ROWS));
    }

    #[test]
    fn seeds_differ() {
        assert_ne!(synthetic_csv(1), synthetic_csv(2));
        assert_eq!(synthetic_csv(7), synthetic_csv(7));
    }
}
