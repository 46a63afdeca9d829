//! OLS machinery, Newey-West HAC covariance, the two-step residual-based
//! cointegration fit and the error-correction model estimator.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::hypothesis::{
    self, adf_regression, kpss, Deterministic, KpssCase, MacKinnonTable, TestResult,
};

/// Fractional-integration level of the error-correction term above which the
/// ECM regression mixes integration orders and its estimates are flagged.
pub const LONG_MEMORY_WARN_THRESHOLD: f64 = 0.25;

#[derive(Debug, Clone)]
pub struct OlsFit {
    pub coefficients: Vec<f64>,
    pub residuals: Vec<f64>,
    pub fitted: Vec<f64>,
    pub nobs: usize,
    pub design_width: usize,
}

fn design_matrix(y: &[f64], cols: &[Vec<f64>]) -> Result<(DMatrix<f64>, DVector<f64>)> {
    let n = y.len();
    let k = cols.len();
    if k == 0 {
        return Err(Error::InvalidParameter("empty design matrix".into()));
    }
    for (j, c) in cols.iter().enumerate() {
        if c.len() != n {
            return Err(Error::LengthMismatch(format!(
                "column {j} has {} rows, dependent has {n}",
                c.len()
            )));
        }
    }
    if n <= k {
        return Err(Error::TooShort { len: n, min: k + 1 });
    }
    let x = DMatrix::from_fn(n, k, |i, j| cols[j][i]);
    Ok((x, DVector::from_column_slice(y)))
}

/// Least squares via Householder QR; rank checked on the pivoted factor.
pub fn ols(y: &[f64], cols: &[Vec<f64>]) -> Result<OlsFit> {
    let (x, yv) = design_matrix(y, cols)?;
    let n = x.nrows();
    let k = x.ncols();

    let piv = x.clone().col_piv_qr();
    let r_piv = piv.r();
    let scale = r_piv[(0, 0)].abs();
    let tol = scale * 1e-10 * (n.max(k) as f64);
    let rank = (0..k).filter(|&i| r_piv[(i, i)].abs() > tol).count();
    if rank < k {
        return Err(Error::RankDeficient { rank, cols: k });
    }

    let qr = x.clone().qr();
    let qty = qr.q().transpose() * &yv;
    let beta = qr
        .r()
        .solve_upper_triangular(&qty)
        .ok_or(Error::RankDeficient { rank, cols: k })?;

    let fitted_v = &x * &beta;
    let residuals: Vec<f64> = (0..n).map(|i| yv[i] - fitted_v[i]).collect();
    Ok(OlsFit {
        coefficients: beta.iter().copied().collect(),
        residuals,
        fitted: fitted_v.iter().copied().collect(),
        nobs: n,
        design_width: k,
    })
}

fn xtx_inverse(cols: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let n = cols[0].len();
    let k = cols.len();
    let x = DMatrix::from_fn(n, k, |i, j| cols[j][i]);
    (x.transpose() * &x)
        .try_inverse()
        .ok_or(Error::RankDeficient { rank: 0, cols: k })
}

/// Classical homoskedastic standard errors of an OLS fit.
pub fn classical_se(fit: &OlsFit, cols: &[Vec<f64>]) -> Result<Vec<f64>> {
    let n = fit.nobs;
    let k = fit.design_width;
    let inv = xtx_inverse(cols)?;
    let s2 = fit.residuals.iter().map(|e| e * e).sum::<f64>() / (n - k) as f64;
    Ok((0..k).map(|i| (s2 * inv[(i, i)]).sqrt()).collect())
}

/// Default Newey-West truncation lag, floor(4 (T/100)^{2/9}).
pub fn nw_default_bandwidth(n: usize) -> usize {
    (4.0 * (n as f64 / 100.0).powf(2.0 / 9.0)).floor() as usize
}

/// Newey-West HAC standard errors with Bartlett weights w_l = 1 - l/(L+1).
/// Bandwidth 0 reduces to White's heteroskedasticity-only sandwich.
pub fn hac_se(fit: &OlsFit, cols: &[Vec<f64>], bandwidth: Option<usize>) -> Result<Vec<f64>> {
    let n = fit.nobs;
    let k = fit.design_width;
    let lag_max = bandwidth.unwrap_or_else(|| nw_default_bandwidth(n));
    if lag_max >= n {
        return Err(Error::BandwidthOutOfRange {
            bandwidth: lag_max,
            nobs: n,
        });
    }
    for (j, c) in cols.iter().enumerate() {
        if c.len() != n {
            return Err(Error::LengthMismatch(format!(
                "column {j} has {} rows, fit has {n}",
                c.len()
            )));
        }
    }

    let e = &fit.residuals;
    let mut meat = DMatrix::<f64>::zeros(k, k);
    for t in 0..n {
        let w = e[t] * e[t];
        for i in 0..k {
            for j in 0..k {
                meat[(i, j)] += w * cols[i][t] * cols[j][t];
            }
        }
    }
    for lag in 1..=lag_max {
        let w = 1.0 - lag as f64 / (lag_max as f64 + 1.0);
        for t in lag..n {
            let s = e[t] * e[t - lag];
            for i in 0..k {
                for j in 0..k {
                    meat[(i, j)] += w * s * (cols[i][t] * cols[j][t - lag] + cols[i][t - lag] * cols[j][t]);
                }
            }
        }
    }

    let bread = xtx_inverse(cols)?;
    let cov = &bread * meat * &bread;
    Ok((0..k).map(|i| cov[(i, i)].sqrt()).collect())
}

// ---------------------------------------------------------------------------
// Engle-Granger two-step cointegration
// ---------------------------------------------------------------------------

/// Which tau table the residual unit-root p-value is referred to. The
/// residual-based default accounts for the estimated regression; the plain
/// table matches software that treats the residuals as an observed series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResidualTable {
    EngleGranger,
    PlainAdf,
}

impl ResidualTable {
    fn mackinnon(self) -> MacKinnonTable {
        match self {
            ResidualTable::EngleGranger => MacKinnonTable::CointTwoVar,
            ResidualTable::PlainAdf => MacKinnonTable::AdfConstant,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EgOptions {
    /// Proceed even when an input fails the unit-root precondition; the
    /// violation is recorded in the fit's warnings.
    pub force: bool,
    pub hac_bandwidth: Option<usize>,
    pub adf_lags: Option<usize>,
    pub kpss_bandwidth: Option<usize>,
    pub residual_table: ResidualTable,
}

impl Default for EgOptions {
    fn default() -> Self {
        Self {
            force: false,
            hac_bandwidth: None,
            adf_lags: None,
            kpss_bandwidth: None,
            residual_table: ResidualTable::EngleGranger,
        }
    }
}

/// Fitted long-run relationship y = intercept + transmission * x + ect.
#[derive(Debug, Clone)]
pub struct CointegrationFit {
    pub intercept: f64,
    pub transmission: f64,
    /// HAC standard errors for (intercept, transmission).
    pub hac_se: [f64; 2],
    pub ect: Vec<f64>,
    pub residual_adf: TestResult,
    pub residual_kpss: TestResult,
    pub cointegrated: bool,
    pub nobs: usize,
    pub warnings: Vec<String>,
}

/// Two-step residual-based cointegration fit of log gas on log oil.
pub fn engle_granger(gas: &[f64], oil: &[f64], opts: &EgOptions) -> Result<CointegrationFit> {
    if gas.len() != oil.len() {
        return Err(Error::LengthMismatch(format!(
            "{} vs {} observations",
            gas.len(),
            oil.len()
        )));
    }
    let n = gas.len();
    if n < crate::timeseries::MIN_ALIGNED_LEN {
        return Err(Error::SampleTooSmall {
            len: n,
            min: crate::timeseries::MIN_ALIGNED_LEN,
        });
    }

    let mut warnings = Vec::new();
    for (name, series) in [("dependent", gas), ("regressor", oil)] {
        let pre = hypothesis::adf(series, Deterministic::Constant, opts.adf_lags)?;
        if pre.p_value.rejects_at(0.05) {
            let msg = format!(
                "{name} series rejects the unit-root null (ADF {:.4}); cointegration framework questionable",
                pre.statistic
            );
            if opts.force {
                warnings.push(msg);
            } else {
                return Err(Error::Precondition(msg));
            }
        }
    }

    let cols = vec![vec![1.0; n], oil.to_vec()];
    let fit = ols(gas, &cols)?;
    let se = hac_se(&fit, &cols, opts.hac_bandwidth)?;

    let ect = fit.residuals.clone();
    let reg = adf_regression(&ect, Deterministic::None, opts.adf_lags)?;
    let table = opts.residual_table.mackinnon();
    let residual_adf = TestResult {
        statistic: reg.statistic,
        p_value: hypothesis::mackinnon_pvalue(reg.statistic, table),
        method: "adf[none]".to_string(),
        nuisance: reg.lags,
        detail: table.name().to_string(),
    };
    let residual_kpss = kpss(&ect, KpssCase::Level, opts.kpss_bandwidth)?;
    let cointegrated = residual_adf.p_value.rejects_at(0.05);

    Ok(CointegrationFit {
        intercept: fit.coefficients[0],
        transmission: fit.coefficients[1],
        hac_se: [se[0], se[1]],
        ect,
        residual_adf,
        residual_kpss,
        cointegrated,
        nobs: n,
        warnings,
    })
}

// ---------------------------------------------------------------------------
// Error-correction model
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LagChoice {
    Fixed(usize),
    /// AIC selection over 1..=8 on a common sample.
    Aic,
}

#[derive(Debug, Clone)]
pub struct EcmOptions {
    pub lags: LagChoice,
    /// Add the contemporaneous regressor difference alongside its lags.
    pub contemporaneous: bool,
    pub hac_bandwidth: Option<usize>,
}

impl Default for EcmOptions {
    fn default() -> Self {
        Self {
            lags: LagChoice::Fixed(4),
            contemporaneous: false,
            hac_bandwidth: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EcmFit {
    pub lag_order: usize,
    pub intercept: f64,
    /// Own-lag coefficients on the differenced dependent series.
    pub gamma: Vec<f64>,
    /// Lag coefficients on the differenced regressor series.
    pub delta: Vec<f64>,
    pub contemporaneous: Option<f64>,
    /// Loading on the lagged error-correction term.
    pub eta: f64,
    pub eta_hac_se: f64,
    pub residual_sd: f64,
    pub nobs: usize,
    pub warnings: Vec<String>,
}

impl EcmFit {
    /// Attach the long-memory caveat when the deviation series is fractionally
    /// integrated beyond what the regression tolerates.
    pub fn flag_long_memory(&mut self, d_hat: f64) {
        if d_hat >= LONG_MEMORY_WARN_THRESHOLD {
            self.warnings.push(format!(
                "error-correction term has long memory (d ≈ {d_hat:.3} ≥ {LONG_MEMORY_WARN_THRESHOLD}); \
                 the regression mixes integration orders and the estimates are unreliable"
            ));
        }
    }
}

fn ecm_design(
    d_gas: &[f64],
    d_oil: &[f64],
    ect: &[f64],
    p: usize,
    contemporaneous: bool,
) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    // diff index i covers level step i -> i+1; row t uses ect at level index t
    let m = d_gas.len();
    if m <= p + 3 {
        return Err(Error::TooShort { len: m + 1, min: p + 5 });
    }
    let rows = m - p;
    let y: Vec<f64> = (p..m).map(|i| d_gas[i]).collect();
    let mut cols: Vec<Vec<f64>> = vec![vec![1.0; rows]];
    for j in 1..=p {
        cols.push((p..m).map(|i| d_gas[i - j]).collect());
    }
    for j in 1..=p {
        cols.push((p..m).map(|i| d_oil[i - j]).collect());
    }
    if contemporaneous {
        cols.push((p..m).map(|i| d_oil[i]).collect());
    }
    cols.push((p..m).map(|i| ect[i]).collect());
    Ok((y, cols))
}

/// Estimate the error-correction regression of the differenced dependent
/// series on its own lags, regressor-difference lags and the lagged
/// error-correction term. Inputs are aligned level (log) series.
pub fn ecm(log_gas: &[f64], log_oil: &[f64], ect: &[f64], opts: &EcmOptions) -> Result<EcmFit> {
    let n = log_gas.len();
    if log_oil.len() != n || ect.len() != n {
        return Err(Error::LengthMismatch(
            "gas, oil and ect series must share a sample".into(),
        ));
    }
    let d_gas: Vec<f64> = log_gas.windows(2).map(|w| w[1] - w[0]).collect();
    let d_oil: Vec<f64> = log_oil.windows(2).map(|w| w[1] - w[0]).collect();

    let p = match opts.lags {
        LagChoice::Fixed(p) => {
            if p == 0 {
                return Err(Error::InvalidParameter("lag order must be at least 1".into()));
            }
            p
        }
        LagChoice::Aic => {
            let max_p = 8usize;
            let mut best = (1usize, f64::INFINITY);
            for cand in 1..=max_p {
                // common sample: drop max_p leading rows regardless of cand
                let (y, cols) = ecm_design(&d_gas[max_p - cand..], &d_oil[max_p - cand..],
                    &ect[max_p - cand..], cand, opts.contemporaneous)?;
                let fit = ols(&y, &cols)?;
                let ssr: f64 = fit.residuals.iter().map(|e| e * e).sum();
                let rows = y.len() as f64;
                let aic = rows * (ssr / rows).ln() + 2.0 * cols.len() as f64;
                if aic < best.1 {
                    best = (cand, aic);
                }
            }
            best.0
        }
    };

    let (y, cols) = ecm_design(&d_gas, &d_oil, ect, p, opts.contemporaneous)?;
    let fit = ols(&y, &cols)?;
    let se = hac_se(&fit, &cols, opts.hac_bandwidth)?;

    let k = cols.len();
    let ect_idx = k - 1;
    let coef = &fit.coefficients;
    let gamma = coef[1..1 + p].to_vec();
    let delta = coef[1 + p..1 + 2 * p].to_vec();
    let contemporaneous = if opts.contemporaneous {
        Some(coef[1 + 2 * p])
    } else {
        None
    };
    let ssr: f64 = fit.residuals.iter().map(|e| e * e).sum();
    let residual_sd = (ssr / (fit.nobs - k) as f64).sqrt();

    Ok(EcmFit {
        lag_order: p,
        intercept: coef[0],
        gamma,
        delta,
        contemporaneous,
        eta: coef[ect_idx],
        eta_hac_se: se[ect_idx],
        residual_sd,
        nobs: fit.nobs,
        warnings: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn normals(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
    }

    #[test]
    fn ols_exact_fit_no_intercept() {
        let y = vec![1.0, 2.0, 3.0];
        let fit = ols(&y, &[vec![1.0, 2.0, 3.0]]).unwrap();
        assert!((fit.coefficients[0] - 1.0).abs() < 1e-14);
        assert!(fit.residuals.iter().all(|e| e.abs() < 1e-14));
    }

    #[test]
    fn ols_recovers_exact_line() {
        let x: Vec<f64> = (1..=10).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.0 + 3.0 * v).collect();
        let fit = ols(&y, &[vec![1.0; 10], x]).unwrap();
        assert!((fit.coefficients[0] - 2.0).abs() < 1e-10);
        assert!((fit.coefficients[1] - 3.0).abs() < 1e-10);
    }

    #[test]
    fn ols_rejects_duplicate_column() {
        let x: Vec<f64> = (1..=20).map(|i| i as f64).collect();
        let y = x.clone();
        let err = ols(&y, &[x.clone(), x.clone()]).unwrap_err();
        assert!(matches!(err, Error::RankDeficient { .. }));
    }

    #[test]
    fn ols_identity_and_zero_sum_invariants() {
        let n = 200;
        let x = normals(n, 1);
        let z = normals(n, 2);
        let y: Vec<f64> = (0..n).map(|i| 0.5 + 1.5 * x[i] + z[i]).collect();
        let cols = vec![vec![1.0; n], x];
        let fit = ols(&y, &cols).unwrap();
        let scale = y.iter().map(|v| v.abs()).fold(0.0, f64::max);
        for i in 0..n {
            assert!((fit.residuals[i] + fit.fitted[i] - y[i]).abs() < 1e-10 * scale.max(1.0));
        }
        let rsum: f64 = fit.residuals.iter().sum();
        assert!(rsum.abs() < 1e-8 * scale);
    }

    #[test]
    fn hac_bandwidth_zero_equals_white() {
        let n = 150;
        let x = normals(n, 3);
        let y: Vec<f64> = (0..n).map(|i| 1.0 + 2.0 * x[i] + normals(n, 4)[i] * (1.0 + x[i].abs())).collect();
        let cols = vec![vec![1.0; n], x.clone()];
        let fit = ols(&y, &cols).unwrap();
        let hac = hac_se(&fit, &cols, Some(0)).unwrap();

        // direct White sandwich
        let inv = super::xtx_inverse(&cols).unwrap();
        let k = 2;
        let mut meat = nalgebra::DMatrix::<f64>::zeros(k, k);
        for t in 0..n {
            let w = fit.residuals[t] * fit.residuals[t];
            for i in 0..k {
                for j in 0..k {
                    meat[(i, j)] += w * cols[i][t] * cols[j][t];
                }
            }
        }
        let cov = &inv * meat * &inv;
        for i in 0..k {
            assert!((hac[i] - cov[(i, i)].sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn hac_close_to_classical_under_iid_noise() {
        let n = 4000;
        let x = normals(n, 5);
        let e = normals(n, 6);
        let y: Vec<f64> = (0..n).map(|i| 1.0 + 2.0 * x[i] + e[i]).collect();
        let cols = vec![vec![1.0; n], x];
        let fit = ols(&y, &cols).unwrap();
        let hac = hac_se(&fit, &cols, Some(0)).unwrap();
        let cls = classical_se(&fit, &cols).unwrap();
        for i in 0..2 {
            assert!(
                (hac[i] / cls[i] - 1.0).abs() < 0.05,
                "White vs classical differ too much under iid noise: {} vs {}",
                hac[i],
                cls[i]
            );
        }
    }

    #[test]
    fn hac_exceeds_classical_under_positive_autocorrelation() {
        let n = 2000;
        let x = normals(n, 7);
        let z = normals(n, 8);
        let mut u = vec![0.0; n];
        for t in 1..n {
            u[t] = 0.8 * u[t - 1] + z[t];
        }
        let y: Vec<f64> = (0..n).map(|i| 0.3 + 1.2 * x[i] + u[i]).collect();
        let cols = vec![vec![1.0; n], x];
        let fit = ols(&y, &cols).unwrap();
        let hac = hac_se(&fit, &cols, None).unwrap();
        let cls = classical_se(&fit, &cols).unwrap();
        assert!(
            hac[0] > cls[0],
            "HAC intercept SE should exceed classical under AR(1) errors"
        );
    }

    #[test]
    fn hac_bandwidth_bound() {
        let y = vec![1.0, 2.0, 3.0, 4.0];
        let cols = vec![vec![1.0; 4], vec![0.0, 1.0, 0.0, 1.0]];
        let fit = ols(&y, &cols).unwrap();
        assert!(matches!(
            hac_se(&fit, &cols, Some(4)),
            Err(Error::BandwidthOutOfRange { .. })
        ));
    }

    #[test]
    fn nw_bandwidth_rule() {
        assert_eq!(nw_default_bandwidth(959), 6);
        assert_eq!(nw_default_bandwidth(100), 4);
    }

    fn cointegrated_pair(n: usize, seed: u64, beta: f64) -> (Vec<f64>, Vec<f64>) {
        // x random walk, y = 1 + beta x + stationary AR(1) noise
        let mut x = normals(n, seed);
        for i in 1..n {
            x[i] = x[i - 1] + x[i] * 0.05;
        }
        let z = normals(n, seed.wrapping_add(1));
        let mut u = vec![0.0; n];
        for t in 1..n {
            u[t] = 0.6 * u[t - 1] + 0.02 * z[t];
        }
        let y: Vec<f64> = (0..n).map(|i| 1.0 + beta * x[i] + u[i]).collect();
        (y, x)
    }

    #[test]
    fn engle_granger_detects_constructed_cointegration() {
        let (y, x) = cointegrated_pair(1000, 11, 0.7);
        let fit = engle_granger(&y, &x, &EgOptions::default()).unwrap();
        assert!((fit.transmission - 0.7).abs() < 0.05);
        assert!(fit.cointegrated, "residual ADF: {:?}", fit.residual_adf);
        assert!(fit.hac_se[0] > 0.0 && fit.hac_se[1] > 0.0);

        // ect mean zero within 1e-8 of its scale
        let m = fit.ect.iter().sum::<f64>() / fit.ect.len() as f64;
        let sd = crate::util::variance(&fit.ect).sqrt();
        assert!(m.abs() < 1e-8 * sd.max(1e-12));
    }

    #[test]
    fn engle_granger_precondition_on_stationary_input() {
        let y = normals(400, 13);
        let (dep, _) = cointegrated_pair(400, 14, 0.7);
        let err = engle_granger(&dep, &y, &EgOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));

        let forced = engle_granger(
            &dep,
            &y,
            &EgOptions {
                force: true,
                ..EgOptions::default()
            },
        )
        .unwrap();
        assert!(!forced.warnings.is_empty());
    }

    #[test]
    fn engle_granger_scale_equivariance() {
        let (y_raw, x) = cointegrated_pair(600, 17, 0.7);
        // log-scale shift of the raw dependent series: logs shift by ln c
        let c: f64 = 3.7;
        let shifted: Vec<f64> = y_raw.iter().map(|v| v + c.ln()).collect();
        let opts = EgOptions::default();
        let a = engle_granger(&y_raw, &x, &opts).unwrap();
        let b = engle_granger(&shifted, &x, &opts).unwrap();
        assert!((b.intercept - a.intercept - c.ln()).abs() < 1e-10);
        assert!((b.transmission - a.transmission).abs() < 1e-10);
        for i in 0..a.ect.len() {
            assert!((a.ect[i] - b.ect[i]).abs() < 1e-10);
        }

        // regressor-side currency rescale: intercept absorbs -beta ln c
        let oil_shifted: Vec<f64> = x.iter().map(|v| v + c.ln()).collect();
        let r = engle_granger(&y_raw, &oil_shifted, &opts).unwrap();
        assert!((r.transmission - a.transmission).abs() < 1e-10);
        assert!((r.intercept - (a.intercept - a.transmission * c.ln())).abs() < 1e-8);
        for i in 0..a.ect.len() {
            assert!((a.ect[i] - r.ect[i]).abs() < 1e-8);
        }
    }

    #[test]
    fn ecm_recovers_known_loading() {
        let n = 5000;
        let p = 2;
        let (gamma, delta, eta) = ([0.2, -0.1], [0.3, 0.1], -0.2);
        let z = normals(n, 21);
        let mut ect = vec![0.0; n];
        for t in 1..n {
            ect[t] = 0.8 * ect[t - 1] + 0.05 * z[t];
        }
        let d_oil = normals(n - 1, 22).iter().map(|v| 0.02 * v).collect::<Vec<f64>>();
        let u = normals(n - 1, 23);
        let mut d_gas = vec![0.0; n - 1];
        for i in p..n - 1 {
            let mut v = 0.001 + 0.01 * u[i];
            for j in 1..=p {
                v += gamma[j - 1] * d_gas[i - j] + delta[j - 1] * d_oil[i - j];
            }
            v += eta * ect[i];
            d_gas[i] = v;
        }
        // integrate differences back to levels
        let mut lg = vec![0.0; n];
        let mut lo = vec![0.0; n];
        for i in 0..n - 1 {
            lg[i + 1] = lg[i] + d_gas[i];
            lo[i + 1] = lo[i] + d_oil[i];
        }
        let fit = ecm(
            &lg,
            &lo,
            &ect,
            &EcmOptions {
                lags: LagChoice::Fixed(p),
                ..EcmOptions::default()
            },
        )
        .unwrap();
        assert!(
            (fit.eta - eta).abs() < 2.0 * fit.eta_hac_se,
            "eta {} ± {} vs true {eta}",
            fit.eta,
            fit.eta_hac_se
        );
        assert_eq!(fit.gamma.len(), p);
        assert_eq!(fit.delta.len(), p);
    }

    #[test]
    fn ecm_contemporaneous_term_and_aic_selection() {
        let n = 4000;
        let p = 2;
        let (gamma, delta, delta0, eta) = ([0.2, -0.1], [0.3, 0.1], 0.25, -0.2);
        let z = normals(n, 25);
        let mut ect = vec![0.0; n];
        for t in 1..n {
            ect[t] = 0.8 * ect[t - 1] + 0.05 * z[t];
        }
        let d_oil: Vec<f64> = normals(n - 1, 26).iter().map(|v| 0.02 * v).collect();
        let u = normals(n - 1, 27);
        let mut d_gas = vec![0.0; n - 1];
        for i in p..n - 1 {
            let mut v = 0.001 + 0.01 * u[i] + delta0 * d_oil[i] + eta * ect[i];
            for j in 1..=p {
                v += gamma[j - 1] * d_gas[i - j] + delta[j - 1] * d_oil[i - j];
            }
            d_gas[i] = v;
        }
        let mut lg = vec![0.0; n];
        let mut lo = vec![0.0; n];
        for i in 0..n - 1 {
            lg[i + 1] = lg[i] + d_gas[i];
            lo[i + 1] = lo[i] + d_oil[i];
        }

        let fit = ecm(
            &lg,
            &lo,
            &ect,
            &EcmOptions {
                lags: LagChoice::Fixed(p),
                contemporaneous: true,
                hac_bandwidth: None,
            },
        )
        .unwrap();
        let d0 = fit.contemporaneous.expect("contemporaneous coefficient");
        assert!((d0 - delta0).abs() < 0.05, "delta0 {d0}");
        assert!((fit.eta - eta).abs() < 3.0 * fit.eta_hac_se);

        let aic_fit = ecm(
            &lg,
            &lo,
            &ect,
            &EcmOptions {
                lags: LagChoice::Aic,
                contemporaneous: true,
                hac_bandwidth: None,
            },
        )
        .unwrap();
        assert!((1..=8).contains(&aic_fit.lag_order));
        assert!((aic_fit.eta - eta).abs() < 3.0 * aic_fit.eta_hac_se);
    }

    #[test]
    fn ecm_zero_ect_is_rank_deficient() {
        let lg = normals(200, 31);
        let lo = normals(200, 32);
        let ect = vec![0.0; 200];
        let err = ecm(&lg, &lo, &ect, &EcmOptions::default()).unwrap_err();
        assert!(matches!(err, Error::RankDeficient { .. }));
    }

    #[test]
    fn ecm_long_memory_flagging() {
        let mut fit = EcmFit {
            lag_order: 4,
            intercept: 0.0,
            gamma: vec![0.0; 4],
            delta: vec![0.0; 4],
            contemporaneous: None,
            eta: -0.05,
            eta_hac_se: 0.01,
            residual_sd: 0.01,
            nobs: 100,
            warnings: Vec::new(),
        };
        fit.flag_long_memory(0.1);
        assert!(fit.warnings.is_empty());
        fit.flag_long_memory(0.65);
        assert_eq!(fit.warnings.len(), 1);
    }
}
