mod common;

use common::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use reversal_core::linalg::{adjusted_coefficient, DataMatrix};
use reversal_core::reversal::{axis_bound_stable, diagnose, product_bound_stable, reversal_ratio, RegressionProblem, Verdict};
use reversal_core::subsets::{enumerate_subsets, DEFAULT_SUBSET_CEILING};

#[test]
fn ratio_above_one_iff_sign_flips() {
    let mut rng = rng(11);
    let mut checked = 0;
    let mut flips = 0;
    while checked < 500 {
        let p = rng.random_range(0..=2);
        let k = rng.random_range(1..=4);
        let n = rng.random_range(p + k + 3..=12);
        let problem = random_problem(&mut rng, n, p, k);
        let ratio = reversal_ratio(&problem).unwrap();
        if (ratio - 1.0).abs() < 1e-6 {
            continue;
        }
        let before = oracle_coefficient(&problem, 0);
        let after = oracle_coefficient(&problem, (1 << k) - 1);
        let flipped = before.signum() != after.signum();
        assert_eq!(ratio > 1.0, flipped, "ratio {ratio}, before {before}, after {after}");
        flips += flipped as usize;
        checked += 1;
    }
    // the sample must exercise both sides of the criterion
    assert!(flips > 20 && flips < 480, "{flips} flips");
}

/// y = x + noise with a random signal strength; candidates are pure noise.
fn weakly_confounded(rng: &mut ChaCha8Rng, k: usize) -> RegressionProblem {
    loop {
        let p = rng.random_range(0..=1);
        let n = rng.random_range(k + p + 4..=k + p + 30);
        let x = normal_vec(rng, n);
        let strength = rng.random_range(0.2..3.0);
        let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let noise = normal_vec(rng, n);
        let y: Vec<f64> = x.iter().zip(&noise).map(|(a, e)| sign * strength * a + e).collect();
        let w = normal_matrix(rng, "w", n, p);
        let u = normal_matrix(rng, "u", n, k);
        if let Ok(problem) = RegressionProblem::new(column("y", y), column("x", x), w, u) {
            return problem;
        }
    }
}

#[test]
fn product_bound_is_sound() {
    let mut rng = rng(12);
    let mut found = 0;
    let mut tries = 0;
    while found < 200 {
        tries += 1;
        assert!(tries < 100_000);
        let k = rng.random_range(1..=8);
        let problem = weakly_confounded(&mut rng, k);
        let d = diagnose(&problem).unwrap();
        if !product_bound_stable(d.multiple_r_ux, d.multiple_r_uy, d.partial_r) {
            continue;
        }
        found += 1;
        assert!(!oracle_any_flip(&problem), "product bound held but a subset flips");
        let report = enumerate_subsets(&problem, DEFAULT_SUBSET_CEILING).unwrap();
        assert!(!report.any_reversal);
    }
}

#[test]
fn axis_bound_is_sound() {
    let mut rng = rng(13);
    let mut found = 0;
    let mut beyond_product = 0;
    let mut tries = 0;
    while found < 200 {
        tries += 1;
        assert!(tries < 100_000);
        let k = rng.random_range(1..=8);
        let problem = weakly_confounded(&mut rng, k);
        if !axis_bound_stable(&problem).unwrap() {
            continue;
        }
        found += 1;
        let d = diagnose(&problem).unwrap();
        beyond_product += !d.product_bound as usize;
        assert!(!oracle_any_flip(&problem), "axis bound held but a subset flips");
    }
    println!("{beyond_product} of 200 certified only by the axis bound");
}

#[test]
fn single_candidate_specialization() {
    let mut rng = rng(14);
    for _ in 0..200 {
        let p = rng.random_range(0..=2);
        let n = rng.random_range(p + 5..=12);
        let problem = random_problem(&mut rng, n, p, 1);
        let d = diagnose(&problem).unwrap();
        assert!((d.fitted_corr.abs() - 1.0).abs() < 1e-9);
        if (d.reversal_ratio - 1.0).abs() > 1e-9 {
            let product_exceeds = d.multiple_r_ux * d.multiple_r_uy > d.partial_r.abs();
            // with one candidate, R R > |r| is necessary and sufficient
            assert_eq!(product_exceeds && d.fitted_corr * d.partial_r > 0.0, d.reversal_ratio > 1.0);
        }
    }
}

#[test]
fn verdicts_are_mutually_consistent() {
    let mut rng = rng(15);
    for _ in 0..300 {
        let p = rng.random_range(0..=2);
        let k = rng.random_range(1..=4);
        let n = rng.random_range(p + k + 3..=12);
        let problem = random_problem(&mut rng, n, p, k);
        let d = diagnose(&problem).unwrap();
        if d.verdict == Verdict::ReversalCertain {
            assert!(!d.product_bound && !d.axis_bound);
            assert_ne!(d.sign_adjusted, d.sign_unadjusted);
        }
        if d.verdict.is_stable() {
            assert!(d.reversal_ratio <= 1.0);
            assert_eq!(d.sign_adjusted, d.sign_unadjusted);
        }
        if d.product_bound {
            assert!(d.axis_bound || d.verdict == Verdict::StableByProductBound);
        }
        let report = enumerate_subsets(&problem, DEFAULT_SUBSET_CEILING).unwrap();
        assert_eq!(report.baseline_sign(), d.sign_unadjusted);
        assert_eq!(report.sign_of(reversal_core::subsets::SubsetId((1 << k) - 1)), Some(d.sign_adjusted));
    }
}

#[test]
fn indeterminate_when_bounds_fail_without_a_flip() {
    let mut rng = rng(16);
    for _ in 0..200_000 {
        let k = 4;
        let n = rng.random_range(8..=10);
        let problem = random_problem(&mut rng, n, 0, k);
        let d = diagnose(&problem).unwrap();
        if d.product_bound || d.axis_bound || d.reversal_ratio > 1.0 {
            continue;
        }
        if oracle_any_flip(&problem) {
            continue;
        }
        assert_eq!(d.verdict, Verdict::Indeterminate);
        return;
    }
    panic!("no instance found");
}

#[test]
fn enumeration_agrees_with_closed_form_route() {
    let mut rng = rng(17);
    for _ in 0..100 {
        let p = rng.random_range(0..=1);
        let n = rng.random_range(p + 8..=12);
        let problem = random_problem(&mut rng, n, p, 4);
        let report = enumerate_subsets(&problem, DEFAULT_SUBSET_CEILING).unwrap();
        assert_eq!(report.outcomes.len(), 16);
        let ctx = problem.residualized().unwrap();
        let base = adjusted_coefficient(&ctx.y_res, &ctx.x_res, &DataMatrix::empty()).unwrap().signum();
        let any = (1..16u64).any(|m| {
            adjusted_coefficient(&ctx.y_res, &ctx.x_res, &ctx.u_res.select_mask(m)).unwrap().signum() != base
        });
        assert_eq!(report.any_reversal, any);
        for o in &report.outcomes {
            let alt = adjusted_coefficient(&ctx.y_res, &ctx.x_res, &ctx.u_res.select_mask(o.subset.0)).unwrap();
            assert!((o.coefficient - alt).abs() < 1e-8 * (1.0 + alt.abs()));
        }
    }
}

#[test]
fn orthogonal_single_candidate_keeps_both_signs() {
    let mut rng = rng(18);
    let n = 9;
    let problem = random_problem(&mut rng, n, 0, 1);
    // replace u by its component orthogonal to e, x and y
    let ctx = problem.residualized().unwrap();
    let u = problem.u().columns()[0].values().to_vec();
    let mut basis: Vec<Vec<f64>> = vec![vec![1.0 / (n as f64).sqrt(); n]];
    for v in [ctx.x_res.values(), ctx.y_res.values()] {
        let mut w = v.to_vec();
        for b in &basis {
            let d: f64 = b.iter().zip(&w).map(|(p, q)| p * q).sum();
            w.iter_mut().zip(b).for_each(|(wi, bi)| *wi -= d * bi);
        }
        let norm = w.iter().map(|a| a * a).sum::<f64>().sqrt();
        basis.push(w.into_iter().map(|a| a / norm).collect());
    }
    let mut u_perp = u;
    for b in &basis {
        let d: f64 = b.iter().zip(&u_perp).map(|(p, q)| p * q).sum();
        u_perp.iter_mut().zip(b).for_each(|(ui, bi)| *ui -= d * bi);
    }
    let problem = RegressionProblem::new(
        problem.y().clone(),
        problem.x().clone(),
        DataMatrix::empty(),
        DataMatrix::new(vec![column("u", u_perp)]).unwrap(),
    )
    .unwrap();
    let report = enumerate_subsets(&problem, DEFAULT_SUBSET_CEILING).unwrap();
    assert!(!report.any_reversal);
    assert_eq!(diagnose(&problem).unwrap().verdict, Verdict::StableByProductBound);
}
