//! Asymmetry statistics on an equilibrium-deviation series: median test,
//! wave (run-length) test and rescaled range ratio test, each calibrated
//! against phase-randomized surrogates.
//!
//! Sign convention throughout: a value belongs to the positive side iff it is
//! >= 0, so runs, signed sums and semi-variances partition identically.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::surrogate::{summarize_null, MonteCarloPValue, SurrogateEnsemble};

/// Maximal blocks of consecutive same-sign observations, in order of
/// appearance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunsDecomposition {
    pub positive_runs: Vec<usize>,
    pub negative_runs: Vec<usize>,
}

impl RunsDecomposition {
    pub fn total_length(&self) -> usize {
        self.positive_runs.iter().sum::<usize>() + self.negative_runs.iter().sum::<usize>()
    }
}

pub fn runs_decompose(x: &[f64]) -> Result<RunsDecomposition> {
    if x.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut positive_runs = Vec::new();
    let mut negative_runs = Vec::new();
    let mut sign = x[0] >= 0.0;
    let mut len = 0usize;
    for v in x {
        let s = *v >= 0.0;
        if s == sign {
            len += 1;
        } else {
            if sign {
                positive_runs.push(len);
            } else {
                negative_runs.push(len);
            }
            sign = s;
            len = 1;
        }
    }
    if sign {
        positive_runs.push(len);
    } else {
        negative_runs.push(len);
    }
    Ok(RunsDecomposition {
        positive_runs,
        negative_runs,
    })
}

/// Sample median; even lengths average the two central order statistics.
pub fn median_stat(x: &[f64]) -> Result<f64> {
    if x.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut sorted = x.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    Ok(if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    })
}

/// Mean positive-run length minus mean negative-run length. Undefined when
/// the series never changes sign.
pub fn wave_stat(x: &[f64]) -> Result<f64> {
    let runs = runs_decompose(x)?;
    if runs.positive_runs.is_empty() || runs.negative_runs.is_empty() {
        return Err(Error::DegenerateStatistic(
            "single-signed series has no wave statistic".into(),
        ));
    }
    let pos = runs.positive_runs.iter().sum::<usize>() as f64 / runs.positive_runs.len() as f64;
    let neg = runs.negative_runs.iter().sum::<usize>() as f64 / runs.negative_runs.len() as f64;
    Ok(pos - neg)
}

/// Rescaled range ratio: the signed-sum ranges of the positive and negative
/// parts, each rescaled by the opposite side's semi-variance,
/// (R+/R-) * (Σ_{x<0} x² / Σ_{x>=0} x²).
pub fn rrr_stat(x: &[f64]) -> Result<f64> {
    if x.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut r_pos = 0.0;
    let mut r_neg = 0.0;
    let mut sq_pos = 0.0;
    let mut sq_neg = 0.0;
    for v in x {
        if *v >= 0.0 {
            r_pos += v;
            sq_pos += v * v;
        } else {
            r_neg -= v;
            sq_neg += v * v;
        }
    }
    if r_neg == 0.0 {
        return Err(Error::DegenerateStatistic(
            "no negative values; rescaled range ratio undefined".into(),
        ));
    }
    if sq_pos == 0.0 {
        return Err(Error::DegenerateStatistic(
            "zero positive sum of squares; rescaled range ratio undefined".into(),
        ));
    }
    Ok(r_pos / r_neg * (sq_neg / sq_pos))
}

/// Tag for one of the three asymmetry tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AsymmetryTest {
    Median,
    Wave,
    Rrr,
}

impl AsymmetryTest {
    pub const ALL: [AsymmetryTest; 3] = [
        AsymmetryTest::Median,
        AsymmetryTest::Wave,
        AsymmetryTest::Rrr,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            AsymmetryTest::Median => "median",
            AsymmetryTest::Wave => "wave",
            AsymmetryTest::Rrr => "rrr",
        }
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        match self {
            AsymmetryTest::Median => median_stat(x),
            AsymmetryTest::Wave => wave_stat(x),
            AsymmetryTest::Rrr => rrr_stat(x),
        }
    }
}

impl std::str::FromStr for AsymmetryTest {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "median" => Ok(AsymmetryTest::Median),
            "wave" => Ok(AsymmetryTest::Wave),
            "rrr" => Ok(AsymmetryTest::Rrr),
            other => Err(Error::InvalidParameter(format!(
                "unknown test '{other}' (expected median, wave or rrr)"
            ))),
        }
    }
}

/// All three tests evaluated on one series against a single shared surrogate
/// ensemble.
#[derive(Debug, Clone, Serialize)]
pub struct AsymmetryReport {
    pub median: MonteCarloPValue,
    pub wave: MonteCarloPValue,
    pub rrr: MonteCarloPValue,
    pub n_surrogates: usize,
    pub seed: u64,
}

/// Surrogate statistic distributions backing an [`AsymmetryReport`].
#[derive(Debug, Clone)]
pub struct NullDistributions {
    pub median: Vec<f64>,
    pub wave: Vec<f64>,
    pub rrr: Vec<f64>,
}

/// Run the three asymmetry tests with one surrogate ensemble (members are
/// generated once and read by all three statistics), returning the surrogate
/// statistic distributions as well.
pub fn asym_report_with_null(
    ect: &[f64],
    n: usize,
    seed: u64,
) -> Result<(AsymmetryReport, NullDistributions)> {
    if n < 100 {
        return Err(Error::InvalidParameter(format!(
            "need at least 100 surrogates, got {n}"
        )));
    }
    let observed = [median_stat(ect)?, wave_stat(ect)?, rrr_stat(ect)?];
    let ensemble = SurrogateEnsemble::new(ect, n, seed)?;

    let evaluated: Vec<[Result<f64>; 3]> = (0..n)
        .into_par_iter()
        .map(|i| {
            let member = ensemble.member(i);
            [
                median_stat(&member),
                wave_stat(&member),
                rrr_stat(&member),
            ]
        })
        .collect();

    let null = NullDistributions {
        median: collect_test(&evaluated, 0)?,
        wave: collect_test(&evaluated, 1)?,
        rrr: collect_test(&evaluated, 2)?,
    };

    let report = AsymmetryReport {
        median: summarize_null(observed[0], &null.median),
        wave: summarize_null(observed[1], &null.wave),
        rrr: summarize_null(observed[2], &null.rrr),
        n_surrogates: n,
        seed,
    };
    Ok((report, null))
}

/// Per-test extraction; degenerate replicas are reported with the count and
/// first index affected.
fn collect_test(evaluated: &[[Result<f64>; 3]], test_idx: usize) -> Result<Vec<f64>> {
    let mut vals = Vec::with_capacity(evaluated.len());
    let mut failed = 0usize;
    let mut first = 0usize;
    for (i, row) in evaluated.iter().enumerate() {
        match &row[test_idx] {
            Ok(v) => vals.push(*v),
            Err(_) => {
                if failed == 0 {
                    first = i;
                }
                failed += 1;
            }
        }
    }
    if failed > 0 {
        return Err(Error::DegenerateReplicas {
            test: AsymmetryTest::ALL[test_idx].name(),
            failed,
            total: evaluated.len(),
            first,
        });
    }
    Ok(vals)
}

/// See [`asym_report_with_null`].
pub fn asym_report(ect: &[f64], n: usize, seed: u64) -> Result<AsymmetryReport> {
    asym_report_with_null(ect, n, seed).map(|(report, _)| report)
}
