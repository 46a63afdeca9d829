//! Spectral estimation of the fractional integration order d: periodogram,
//! log-periodogram (GPH) regression and local Whittle estimation.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::util::mean;

/// Periodogram ordinates I(λ_j) at the Fourier frequencies λ_j = 2πj/T,
/// j = 1..floor(T/2), of the demeaned input.
#[derive(Debug, Clone)]
pub struct Periodogram {
    pub frequencies: Vec<f64>,
    pub ordinates: Vec<f64>,
}

pub fn periodogram(x: &[f64]) -> Result<Periodogram> {
    let n = x.len();
    if n < 8 {
        return Err(Error::TooShort { len: n, min: 8 });
    }
    let m = mean(x);
    let mut buf: Vec<Complex64> = x.iter().map(|v| Complex64::new(v - m, 0.0)).collect();
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(n);
    fft.process(&mut buf);

    let half = n / 2;
    let scale = 1.0 / (2.0 * PI * n as f64);
    let frequencies = (1..=half).map(|j| 2.0 * PI * j as f64 / n as f64).collect();
    let ordinates = (1..=half).map(|j| buf[j].norm_sqr() * scale).collect();
    Ok(Periodogram {
        frequencies,
        ordinates,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MemoryMethod {
    #[serde(rename = "GPH")]
    Gph,
    #[serde(rename = "LW")]
    LocalWhittle,
}

/// Point estimate of the fractional integration order.
#[derive(Debug, Clone, Serialize)]
pub struct MemoryEstimate {
    pub method: MemoryMethod,
    #[serde(serialize_with = "crate::report::ser_sig6")]
    pub d_hat: f64,
    #[serde(serialize_with = "crate::report::ser_sig6")]
    pub se: f64,
    pub bandwidth: usize,
    /// Set when the minimizer pinned at the search boundary; the estimate is
    /// then untrustworthy.
    pub boundary: bool,
}

/// Default number of low frequencies used by both estimators, floor(T^0.6).
pub fn default_bandwidth(n: usize) -> usize {
    (n as f64).powf(0.6).floor() as usize
}

fn check_bandwidth(n: usize, bandwidth: Option<usize>) -> Result<usize> {
    let m = bandwidth.unwrap_or_else(|| default_bandwidth(n));
    if m < 4 || m > n / 2 {
        return Err(Error::BandwidthOutOfRange { bandwidth: m, nobs: n });
    }
    Ok(m)
}

/// Regressor used by the log-periodogram regression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GphRegressor {
    /// -log(4 sin^2(λ/2))
    #[default]
    Exact,
    /// -2 log λ, the small-frequency approximation
    Asymptotic,
}

/// Log-periodogram regression estimate of d: slope of log I(λ_j) on the
/// chosen regressor over j = 1..m, with the regression standard error.
pub fn gph(x: &[f64], bandwidth: Option<usize>, regressor: GphRegressor) -> Result<MemoryEstimate> {
    let pg = periodogram(x)?;
    let m = check_bandwidth(x.len(), bandwidth)?;

    let mut xs = Vec::with_capacity(m);
    let mut ys = Vec::with_capacity(m);
    for j in 0..m {
        let lam = pg.frequencies[j];
        let ord = pg.ordinates[j];
        if ord <= 0.0 {
            return Err(Error::ZeroOrdinate(j + 1));
        }
        let reg = match regressor {
            GphRegressor::Exact => -(4.0 * (lam / 2.0).sin().powi(2)).ln(),
            GphRegressor::Asymptotic => -2.0 * lam.ln(),
        };
        xs.push(reg);
        ys.push(ord.ln());
    }

    let mx = mean(&xs);
    let my = mean(&ys);
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for j in 0..m {
        sxx += (xs[j] - mx) * (xs[j] - mx);
        sxy += (xs[j] - mx) * (ys[j] - my);
    }
    let d_hat = sxy / sxx;
    let ssr: f64 = (0..m)
        .map(|j| {
            let e = ys[j] - my - d_hat * (xs[j] - mx);
            e * e
        })
        .sum();
    let se = (ssr / (m - 2) as f64 / sxx).sqrt();

    Ok(MemoryEstimate {
        method: MemoryMethod::Gph,
        d_hat,
        se,
        bandwidth: m,
        boundary: false,
    })
}

/// Local Whittle profile objective
/// R(d) = log((1/m) Σ λ_j^{2d} I_j) - (2d/m) Σ log λ_j over j = 1..m.
pub fn lw_objective(d: f64, frequencies: &[f64], ordinates: &[f64], m: usize) -> f64 {
    let mut g = 0.0;
    let mut sum_log = 0.0;
    for j in 0..m {
        let lam = frequencies[j];
        g += (2.0 * d * lam.ln()).exp() * ordinates[j];
        sum_log += lam.ln();
    }
    (g / m as f64).ln() - 2.0 * d * sum_log / m as f64
}

const LW_LO: f64 = -0.49;
const LW_HI: f64 = 1.0;

/// Local Whittle estimate of d over (-0.49, 1.0): a 50-point grid pre-scan
/// followed by golden-section refinement to 1e-6. se = 1/(2 sqrt(m)).
pub fn local_whittle(x: &[f64], bandwidth: Option<usize>) -> Result<MemoryEstimate> {
    let pg = periodogram(x)?;
    let m = check_bandwidth(x.len(), bandwidth)?;
    for j in 0..m {
        if pg.ordinates[j] <= 0.0 {
            return Err(Error::ZeroOrdinate(j + 1));
        }
    }

    let obj = |d: f64| lw_objective(d, &pg.frequencies, &pg.ordinates, m);

    // grid pre-scan guards against local minima
    let grid_n = 50;
    let step = (LW_HI - LW_LO) / grid_n as f64;
    let mut best_i = 0;
    let mut best_v = f64::INFINITY;
    for i in 0..grid_n {
        let d = LW_LO + (i as f64 + 0.5) * step;
        let v = obj(d);
        if v < best_v {
            best_v = v;
            best_i = i;
        }
    }
    let mut lo = (LW_LO + (best_i as f64 - 0.5) * step).max(LW_LO);
    let mut hi = (LW_LO + (best_i as f64 + 1.5) * step).min(LW_HI);

    // golden-section
    let phi = (5.0_f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - phi * (hi - lo);
    let mut d_ = lo + phi * (hi - lo);
    let mut fc = obj(c);
    let mut fd = obj(d_);
    while hi - lo > 1e-6 {
        if fc < fd {
            hi = d_;
            d_ = c;
            fd = fc;
            c = hi - phi * (hi - lo);
            fc = obj(c);
        } else {
            lo = c;
            c = d_;
            fc = fd;
            d_ = lo + phi * (hi - lo);
            fd = obj(d_);
        }
    }
    let d_hat = 0.5 * (lo + hi);
    let boundary = d_hat <= LW_LO + 1e-3 || d_hat >= LW_HI - 1e-3;

    Ok(MemoryEstimate {
        method: MemoryMethod::LocalWhittle,
        d_hat,
        se: 1.0 / (2.0 * (m as f64).sqrt()),
        bandwidth: m,
        boundary,
    })
}
