//! Classical unit-root and stationarity tests: augmented Dickey-Fuller with
//! MacKinnon response-surface p-values and KPSS with interpolated table
//! p-values reported as one-sided bounds when off-table.

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::regression::{classical_se, ols};
use crate::report::sig6;

/// Deterministic terms included in the ADF test regression.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Deterministic {
    None,
    Constant,
    ConstantTrend,
}

/// Null hypothesis flavour for the KPSS test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KpssCase {
    Level,
    Trend,
}

/// Exact p-value, or a one-sided bound when a tabulated range runs out.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PValue {
    Exact(f64),
    LessThan(f64),
    GreaterThan(f64),
}

impl PValue {
    /// Conservative rejection decision: unknown regions never reject.
    pub fn rejects_at(&self, alpha: f64) -> bool {
        match self {
            PValue::Exact(p) => *p <= alpha,
            PValue::LessThan(b) => *b <= alpha,
            PValue::GreaterThan(_) => false,
        }
    }

    /// Table-style rendering: `0.016`, `<0.01`, `>0.1`.
    pub fn render(&self) -> String {
        match self {
            PValue::Exact(p) => format!("{}", sig6(*p)),
            PValue::LessThan(b) => format!("<{b}"),
            PValue::GreaterThan(b) => format!(">{b}"),
        }
    }
}

impl Serialize for PValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            PValue::Exact(p) => {
                let mut s = serializer.serialize_struct("PValue", 1)?;
                s.serialize_field("value", &sig6(*p))?;
                s.end()
            }
            PValue::LessThan(b) => {
                let mut s = serializer.serialize_struct("PValue", 2)?;
                s.serialize_field("bound", b)?;
                s.serialize_field("direction", "less_than")?;
                s.end()
            }
            PValue::GreaterThan(b) => {
                let mut s = serializer.serialize_struct("PValue", 2)?;
                s.serialize_field("bound", b)?;
                s.serialize_field("direction", "greater_than")?;
                s.end()
            }
        }
    }
}

/// Outcome of a single hypothesis test.
#[derive(Debug, Clone, Serialize)]
pub struct TestResult {
    #[serde(serialize_with = "crate::report::ser_sig6")]
    pub statistic: f64,
    pub p_value: PValue,
    pub method: String,
    /// Lag order or kernel bandwidth actually used.
    pub nuisance: usize,
    /// Description of the null distribution (table name or surrogate count).
    pub detail: String,
}

// ---------------------------------------------------------------------------
// MacKinnon (1994) response-surface p-values
// ---------------------------------------------------------------------------

/// Which response surface a tau statistic is referred to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MacKinnonTable {
    AdfNone,
    AdfConstant,
    AdfTrend,
    /// Residuals of a two-variable cointegrating regression with constant.
    CointTwoVar,
}

impl MacKinnonTable {
    pub fn name(&self) -> &'static str {
        match self {
            MacKinnonTable::AdfNone => "MacKinnon (1994) surface, no deterministics",
            MacKinnonTable::AdfConstant => "MacKinnon (1994) surface, constant",
            MacKinnonTable::AdfTrend => "MacKinnon (1994) surface, constant and trend",
            MacKinnonTable::CointTwoVar => {
                "MacKinnon (1994) surface, Engle-Granger residuals, 2 variables"
            }
        }
    }
}

struct Surface {
    star: f64,
    min: f64,
    max: f64,
    small: [f64; 3],
    large: [f64; 4],
}

const ADF_NONE: Surface = Surface {
    star: -1.04,
    min: -19.04,
    max: f64::INFINITY,
    small: [0.6344, 1.2378, 0.032496],
    large: [0.4797, 0.93557, -0.06999, 0.033066],
};
const ADF_CONSTANT: Surface = Surface {
    star: -1.61,
    min: -18.83,
    max: 2.74,
    small: [2.1659, 1.4412, 0.038269],
    large: [1.7339, 0.93202, -0.12745, -0.010368],
};
const ADF_TREND: Surface = Surface {
    star: -2.89,
    min: -16.18,
    max: 0.7,
    small: [3.2512, 1.6047, 0.049588],
    large: [2.5261, 0.61654, -0.37956, -0.060285],
};
const COINT_TWO_VAR: Surface = Surface {
    star: -2.62,
    min: -18.86,
    max: 0.92,
    small: [2.92, 1.5012, 0.039796],
    large: [2.1945, 0.64695, -0.29198, -0.042377],
};

/// Asymptotic p-value of a tau statistic under the named table.
pub fn mackinnon_pvalue(stat: f64, table: MacKinnonTable) -> PValue {
    let s = match table {
        MacKinnonTable::AdfNone => &ADF_NONE,
        MacKinnonTable::AdfConstant => &ADF_CONSTANT,
        MacKinnonTable::AdfTrend => &ADF_TREND,
        MacKinnonTable::CointTwoVar => &COINT_TWO_VAR,
    };
    if stat < s.min {
        return PValue::LessThan(1e-6);
    }
    if stat > s.max {
        return PValue::GreaterThan(0.999);
    }
    let z = if stat <= s.star {
        s.small[0] + s.small[1] * stat + s.small[2] * stat * stat
    } else {
        s.large[0] + s.large[1] * stat + s.large[2] * stat * stat + s.large[3] * stat.powi(3)
    };
    let normal = Normal::new(0.0, 1.0).unwrap();
    PValue::Exact(normal.cdf(z).clamp(0.0, 1.0))
}

// ---------------------------------------------------------------------------
// Augmented Dickey-Fuller
// ---------------------------------------------------------------------------

/// Schwert's rule for the largest candidate lag order.
pub fn schwert_max_lags(n: usize) -> usize {
    (12.0 * (n as f64 / 100.0).powf(0.25)).floor() as usize
}

#[derive(Debug, Clone, Copy)]
pub struct AdfRegression {
    pub statistic: f64,
    pub lags: usize,
    pub nobs: usize,
}

/// The tau statistic of the ADF regression; `lags = None` selects the lag
/// order by AIC over 0..=Schwert bound on a common estimation sample.
pub fn adf_regression(
    series: &[f64],
    deterministic: Deterministic,
    lags: Option<usize>,
) -> Result<AdfRegression> {
    let n = series.len();
    if let Some(p) = lags {
        if n <= p + 10 {
            return Err(Error::TooShort { len: n, min: p + 11 });
        }
        let (stat, nobs) = fit_adf(series, p, deterministic, 0)?;
        return Ok(AdfRegression {
            statistic: stat,
            lags: p,
            nobs,
        });
    }

    if n < 15 {
        return Err(Error::TooShort { len: n, min: 15 });
    }
    let det_cols = match deterministic {
        Deterministic::None => 0,
        Deterministic::Constant => 1,
        Deterministic::ConstantTrend => 2,
    };
    // keep enough common-sample rows for the widest candidate regression
    let mut max_lags = schwert_max_lags(n);
    while max_lags > 0 && n - 1 - max_lags <= max_lags + det_cols + 6 {
        max_lags -= 1;
    }

    let mut best = (0usize, f64::INFINITY);
    for p in 0..=max_lags {
        let aic = adf_aic(series, p, deterministic, max_lags)?;
        if aic < best.1 {
            best = (p, aic);
        }
    }
    let p = best.0;
    let (stat, nobs) = fit_adf(series, p, deterministic, 0)?;
    Ok(AdfRegression {
        statistic: stat,
        lags: p,
        nobs,
    })
}

/// ADF regression for lag order `p`, with the sample start pinned at `trim`
/// so AIC comparisons across lag orders share one sample. Returns (tau, rows).
fn fit_adf(
    series: &[f64],
    p: usize,
    deterministic: Deterministic,
    trim: usize,
) -> Result<(f64, usize)> {
    let n = series.len();
    let dy: Vec<f64> = series.windows(2).map(|w| w[1] - w[0]).collect();
    let start = p.max(trim);
    if n < 2 || start + 2 > n - 1 {
        return Err(Error::TooShort { len: n, min: start + 3 });
    }

    let rows = (n - 1) - start;
    let mut y = Vec::with_capacity(rows);
    let mut level = Vec::with_capacity(rows);
    for i in start..(n - 1) {
        y.push(dy[i]);
        level.push(series[i]);
    }
    let mut cols: Vec<Vec<f64>> = vec![level];
    for j in 1..=p {
        cols.push((start..(n - 1)).map(|i| dy[i - j]).collect());
    }
    match deterministic {
        Deterministic::None => {}
        Deterministic::Constant => cols.push(vec![1.0; rows]),
        Deterministic::ConstantTrend => {
            cols.push(vec![1.0; rows]);
            cols.push((0..rows).map(|i| i as f64).collect());
        }
    }
    if rows <= cols.len() + 1 {
        return Err(Error::TooShort {
            len: n,
            min: start + cols.len() + 3,
        });
    }

    let fit = ols(&y, &cols)?;
    let se = classical_se(&fit, &cols)?;
    Ok((fit.coefficients[0] / se[0], rows))
}

fn adf_aic(series: &[f64], p: usize, deterministic: Deterministic, trim: usize) -> Result<f64> {
    let n = series.len();
    let dy: Vec<f64> = series.windows(2).map(|w| w[1] - w[0]).collect();
    let start = p.max(trim);
    let rows = (n - 1) - start;

    let mut y = Vec::with_capacity(rows);
    let mut cols: Vec<Vec<f64>> = Vec::new();
    let mut level = Vec::with_capacity(rows);
    for i in start..(n - 1) {
        y.push(dy[i]);
        level.push(series[i]);
    }
    cols.push(level);
    for j in 1..=p {
        cols.push((start..(n - 1)).map(|i| dy[i - j]).collect());
    }
    match deterministic {
        Deterministic::None => {}
        Deterministic::Constant => cols.push(vec![1.0; rows]),
        Deterministic::ConstantTrend => {
            cols.push(vec![1.0; rows]);
            cols.push((0..rows).map(|i| i as f64).collect());
        }
    }
    let fit = ols(&y, &cols)?;
    let ssr: f64 = fit.residuals.iter().map(|e| e * e).sum();
    let k = cols.len() as f64;
    let m = rows as f64;
    Ok(m * (ssr / m).ln() + 2.0 * k)
}

/// Augmented Dickey-Fuller unit-root test.
pub fn adf(
    series: &[f64],
    deterministic: Deterministic,
    lags: Option<usize>,
) -> Result<TestResult> {
    let reg = adf_regression(series, deterministic, lags)?;
    let table = match deterministic {
        Deterministic::None => MacKinnonTable::AdfNone,
        Deterministic::Constant => MacKinnonTable::AdfConstant,
        Deterministic::ConstantTrend => MacKinnonTable::AdfTrend,
    };
    let case = match deterministic {
        Deterministic::None => "none",
        Deterministic::Constant => "constant",
        Deterministic::ConstantTrend => "constant+trend",
    };
    Ok(TestResult {
        statistic: reg.statistic,
        p_value: mackinnon_pvalue(reg.statistic, table),
        method: format!("adf[{case}]"),
        nuisance: reg.lags,
        detail: table.name().to_string(),
    })
}

// ---------------------------------------------------------------------------
// KPSS
// ---------------------------------------------------------------------------

/// Default kernel bandwidth, floor(4 (T/100)^{1/4}).
pub fn kpss_default_bandwidth(n: usize) -> usize {
    (4.0 * (n as f64 / 100.0).powf(0.25)).floor() as usize
}

// (statistic, p) pairs from the published critical-value table
const KPSS_LEVEL: [(f64, f64); 4] = [(0.347, 0.10), (0.463, 0.05), (0.574, 0.025), (0.739, 0.01)];
const KPSS_TREND: [(f64, f64); 4] = [(0.119, 0.10), (0.146, 0.05), (0.176, 0.025), (0.216, 0.01)];

fn kpss_pvalue(stat: f64, case: KpssCase) -> PValue {
    let table = match case {
        KpssCase::Level => &KPSS_LEVEL,
        KpssCase::Trend => &KPSS_TREND,
    };
    if stat < table[0].0 {
        return PValue::GreaterThan(0.10);
    }
    if stat > table[3].0 {
        return PValue::LessThan(0.01);
    }
    for w in table.windows(2) {
        let ((s0, p0), (s1, p1)) = (w[0], w[1]);
        if stat <= s1 {
            return PValue::Exact(p0 + (stat - s0) / (s1 - s0) * (p1 - p0));
        }
    }
    PValue::Exact(0.01)
}

/// KPSS LM statistic with Bartlett-kernel long-run variance.
pub fn kpss(series: &[f64], case: KpssCase, bandwidth: Option<usize>) -> Result<TestResult> {
    let n = series.len();
    if n <= 20 {
        return Err(Error::TooShort { len: n, min: 21 });
    }
    let bw = bandwidth.unwrap_or_else(|| kpss_default_bandwidth(n));
    if bw >= n {
        return Err(Error::BandwidthOutOfRange { bandwidth: bw, nobs: n });
    }

    let resid: Vec<f64> = match case {
        KpssCase::Level => {
            let m = crate::util::mean(series);
            series.iter().map(|v| v - m).collect()
        }
        KpssCase::Trend => {
            let cols = vec![
                vec![1.0; n],
                (0..n).map(|i| i as f64).collect::<Vec<f64>>(),
            ];
            ols(series, &cols)?.residuals
        }
    };

    let mut cum = 0.0;
    let mut num = 0.0;
    for e in &resid {
        cum += e;
        num += cum * cum;
    }
    num /= (n * n) as f64;

    let mut lrv = resid.iter().map(|e| e * e).sum::<f64>() / n as f64;
    for lag in 1..=bw {
        let w = 1.0 - lag as f64 / (bw as f64 + 1.0);
        let gamma: f64 = resid[lag..]
            .iter()
            .zip(resid.iter())
            .map(|(a, b)| a * b)
            .sum::<f64>()
            / n as f64;
        lrv += 2.0 * w * gamma;
    }
    if lrv <= 0.0 {
        return Err(Error::DegenerateStatistic(
            "non-positive long-run variance".into(),
        ));
    }

    let stat = num / lrv;
    let case_name = match case {
        KpssCase::Level => "level",
        KpssCase::Trend => "trend",
    };
    Ok(TestResult {
        statistic: stat,
        p_value: kpss_pvalue(stat, case),
        method: format!("kpss[{case_name}]"),
        nuisance: bw,
        detail: "KPSS (1992) table, linear interpolation".to_string(),
    })
}
