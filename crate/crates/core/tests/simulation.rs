//! Seeded Monte Carlo checks: estimator recovery, test calibration under the
//! null, one-sided blindness, and power ordering against a symmetric process.

use rayon::prelude::*;

use ectasym::asymmetry::{asym_report, median_stat, AsymmetryTest};
use ectasym::longmemory::local_whittle;
use ectasym::regression::{engle_granger, EgOptions};
use ectasym::synth::{generate, size_power, GeneratorSpec};

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

fn demeaned(mut x: Vec<f64>) -> Vec<f64> {
    let m = mean(&x);
    for v in &mut x {
        *v -= m;
    }
    x
}

#[test]
fn engle_granger_monte_carlo_recovery() {
    let reps = 200u64;
    let hits: usize = (0..reps)
        .into_par_iter()
        .map(|r| {
            let x = generate(&GeneratorSpec::random_walk(1.0, 1000, 40_000 + r)).unwrap();
            let z = generate(&GeneratorSpec::white(1.0, 1000, 41_000 + r)).unwrap();
            let mut u = vec![0.0; 1000];
            for t in 1..1000 {
                u[t] = 0.5 * u[t - 1] + z[t];
            }
            let y: Vec<f64> = (0..1000).map(|i| 1.0 + 0.7 * x[i] + u[i]).collect();
            let fit = engle_granger(
                &y,
                &x,
                &EgOptions {
                    force: true,
                    ..EgOptions::default()
                },
            )
            .unwrap();
            usize::from(fit.cointegrated && (fit.transmission - 0.7).abs() <= 0.05)
        })
        .sum();
    let rate = hits as f64 / reps as f64;
    println!("engle-granger recovery rate: {rate:.3}");
    assert!(rate >= 0.95, "recovery rate {rate} below 0.95");
}

#[test]
fn monte_carlo_pvalues_are_uniform_under_the_null() {
    // long-memory Gaussian null; each run centered as a deviation series
    let runs = 500u64;
    let pvals: Vec<[f64; 3]> = (0..runs)
        .into_par_iter()
        .map(|r| {
            let x = demeaned(generate(&GeneratorSpec::arfima(0.7, 1.0, 959, 42_000 + r)).unwrap());
            let rep = asym_report(&x, 500, 43_000 + (r << 32)).unwrap();
            [rep.median.p_value, rep.wave.p_value, rep.rrr.p_value]
        })
        .collect();

    for (k, name) in ["median", "wave", "rrr"].iter().enumerate() {
        let mut p: Vec<f64> = pvals.iter().map(|row| row[k]).collect();
        p.sort_by(f64::total_cmp);
        let n = p.len() as f64;
        let ks = p
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let hi = ((i + 1) as f64 / n - v).abs();
                let lo = (v - i as f64 / n).abs();
                hi.max(lo)
            })
            .fold(0.0, f64::max);
        println!("{name}: KS distance from uniform = {ks:.4}");
        assert!(ks < 0.08, "{name} p-values not uniform (KS = {ks:.4})");
    }
}

#[test]
fn one_sided_tests_are_blind_to_reversed_asymmetry() {
    // persistent regime above the threshold: the reversed signature for the
    // upper-tail tests (amplitudes pile up above, and the mean shifts up so
    // the series sits mostly below it)
    let reversed = GeneratorSpec::threshold_ar(0.97, 0.8, 1.0, 959, 0);
    for test in AsymmetryTest::ALL {
        let rate = size_power(test, &reversed, 200, 0.05, 500, 44_000).unwrap();
        println!("{} rejection on reversed asymmetry: {rate:.3}", test.name());
        assert!(
            rate <= 0.09,
            "{} should be blind to reversed asymmetry, got {rate}",
            test.name()
        );
    }
}

#[test]
fn wave_power_exceeds_symmetric_size() {
    let symmetric = GeneratorSpec::threshold_ar(0.9, 0.9, 1.0, 959, 0);
    let asymmetric = GeneratorSpec::threshold_ar(0.8, 0.97, 1.0, 959, 0);
    let size = size_power(AsymmetryTest::Wave, &symmetric, 200, 0.05, 500, 45_000).unwrap();
    let power = size_power(AsymmetryTest::Wave, &asymmetric, 200, 0.05, 500, 45_500).unwrap();
    println!("wave: symmetric size {size:.3}, asymmetric power {power:.3}");
    assert!(power > size, "wave power {power} not above size {size}");
}

#[test]
fn symmetric_threshold_ar_has_centered_median_statistic() {
    let reps = 500u64;
    let medians: Vec<f64> = (0..reps)
        .into_par_iter()
        .map(|r| {
            let x = generate(&GeneratorSpec::threshold_ar(0.9, 0.9, 1.0, 959, 46_000 + r)).unwrap();
            median_stat(&x).unwrap()
        })
        .collect();
    let m = mean(&medians);
    let sd = (medians.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (reps - 1) as f64).sqrt();
    let se = sd / (reps as f64).sqrt();
    println!("symmetric TAR median statistic: mean {m:.4} (se {se:.4})");
    assert!(m.abs() <= 2.0 * se, "median statistic mean {m} beyond 2 se = {}", 2.0 * se);
}

#[test]
fn local_whittle_covers_zero_on_white_noise() {
    let reps = 200u64;
    let covered: usize = (0..reps)
        .into_par_iter()
        .map(|r| {
            let x = generate(&GeneratorSpec::white(1.0, 4096, 47_000 + r)).unwrap();
            let est = local_whittle(&x, None).unwrap();
            usize::from(est.d_hat.abs() <= 2.0 * est.se)
        })
        .sum();
    let rate = covered as f64 / reps as f64;
    println!("local Whittle |d| <= 2 se coverage on white noise: {rate:.3}");
    assert!(rate >= 0.90, "coverage {rate} below 0.90");
}

#[test]
fn null_reports_rarely_flag_asymmetry() {
    // all three p-values above 0.05 in at least 90% of runs on symmetric input
    let runs = 100u64;
    let clean: usize = (0..runs)
        .into_par_iter()
        .map(|r| {
            let x = demeaned(generate(&GeneratorSpec::arfima(0.7, 1.0, 959, 48_000 + r)).unwrap());
            let rep = asym_report(&x, 500, 49_000 + (r << 32)).unwrap();
            usize::from(
                rep.median.p_value > 0.05 && rep.wave.p_value > 0.05 && rep.rrr.p_value > 0.05,
            )
        })
        .sum();
    let rate = clean as f64 / runs as f64;
    println!("fraction of null runs with all three p > 0.05: {rate:.2}");
    assert!(rate >= 0.90, "too many null flags: clean rate {rate}");
}
