//! Report records mirroring the pipeline's three result tables, plus the
//! fixed floating-point formatting that keeps emitted reports byte-stable.

use serde::{Serialize, Serializer};

use crate::hypothesis::{PValue, TestResult};
use crate::longmemory::MemoryEstimate;
use crate::surrogate::MonteCarloPValue;

/// Round to six significant digits. All serialized floats pass through this,
/// so identical runs emit identical bytes and diffs stay readable.
pub fn sig6(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let exp = x.abs().log10().floor() as i32;
    let scale = 10f64.powi(5 - exp);
    (x * scale).round() / scale
}

pub fn ser_sig6<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(sig6(*v))
}

pub fn ser_sig6_arr3<S: Serializer>(v: &[f64; 3], s: S) -> Result<S::Ok, S::Error> {
    let rounded = [sig6(v[0]), sig6(v[1]), sig6(v[2])];
    rounded.serialize(s)
}

/// Decimal rendering for CSV cells.
pub fn fmt_f64(v: f64) -> String {
    format!("{}", sig6(v))
}

// ---------------------------------------------------------------------------
// Table rows
// ---------------------------------------------------------------------------

/// Unit-root and stationarity testing of one level series.
#[derive(Debug, Clone, Serialize)]
pub struct UnitRootRow {
    pub series: String,
    #[serde(serialize_with = "ser_sig6")]
    pub adf_stat: f64,
    pub adf_p: PValue,
    pub adf_lags: usize,
    #[serde(serialize_with = "ser_sig6")]
    pub kpss_stat: f64,
    pub kpss_p: PValue,
    pub kpss_bandwidth: usize,
}

impl UnitRootRow {
    pub fn from_results(series: impl Into<String>, adf: &TestResult, kpss: &TestResult) -> Self {
        Self {
            series: series.into(),
            adf_stat: adf.statistic,
            adf_p: adf.p_value,
            adf_lags: adf.nuisance,
            kpss_stat: kpss.statistic,
            kpss_p: kpss.p_value,
            kpss_bandwidth: kpss.nuisance,
        }
    }
}

/// Long-run fit of one market: transmission, deviation-series diagnostics
/// and fractional-integration estimates.
#[derive(Debug, Clone, Serialize)]
pub struct CointegrationRow {
    pub market: String,
    #[serde(serialize_with = "ser_sig6")]
    pub transmission: f64,
    #[serde(serialize_with = "ser_sig6")]
    pub transmission_se: f64,
    #[serde(serialize_with = "ser_sig6")]
    pub intercept: f64,
    #[serde(serialize_with = "ser_sig6")]
    pub intercept_se: f64,
    #[serde(serialize_with = "ser_sig6")]
    pub residual_adf_stat: f64,
    pub residual_adf_p: PValue,
    pub residual_adf_lags: usize,
    #[serde(serialize_with = "ser_sig6")]
    pub residual_kpss_stat: f64,
    pub residual_kpss_p: PValue,
    pub residual_kpss_bandwidth: usize,
    pub lw: MemoryEstimate,
    pub gph: MemoryEstimate,
    pub cointegrated: bool,
    pub critical_values: String,
    pub warnings: Vec<String>,
}

/// Stand-alone cointegration report for the `cointegrate` subcommand.
#[derive(Debug, Clone, Serialize)]
pub struct CointegrationSummary {
    pub label: String,
    pub nobs: usize,
    #[serde(serialize_with = "ser_sig6")]
    pub transmission: f64,
    #[serde(serialize_with = "ser_sig6")]
    pub transmission_se: f64,
    #[serde(serialize_with = "ser_sig6")]
    pub intercept: f64,
    #[serde(serialize_with = "ser_sig6")]
    pub intercept_se: f64,
    pub residual_adf: TestResult,
    pub residual_kpss: TestResult,
    pub cointegrated: bool,
    pub warnings: Vec<String>,
}

/// Error-correction regression exhibit.
#[derive(Debug, Clone, Serialize)]
pub struct EcmRow {
    pub market: String,
    pub lag_order: usize,
    #[serde(serialize_with = "ser_sig6")]
    pub intercept: f64,
    #[serde(serialize_with = "ser_sig6")]
    pub eta: f64,
    #[serde(serialize_with = "ser_sig6")]
    pub eta_hac_se: f64,
    #[serde(serialize_with = "ser_sig6")]
    pub residual_sd: f64,
    pub nobs: usize,
    pub warnings: Vec<String>,
}

/// The three asymmetry tests of one market.
#[derive(Debug, Clone, Serialize)]
pub struct AsymmetryRow {
    pub market: String,
    #[serde(serialize_with = "ser_sig6")]
    pub median_stat: f64,
    #[serde(serialize_with = "ser_sig6")]
    pub median_p: f64,
    #[serde(serialize_with = "ser_sig6")]
    pub wave_stat: f64,
    #[serde(serialize_with = "ser_sig6")]
    pub wave_p: f64,
    #[serde(serialize_with = "ser_sig6")]
    pub rrr_stat: f64,
    #[serde(serialize_with = "ser_sig6")]
    pub rrr_p: f64,
    pub n_surrogates: usize,
    pub seed: u64,
}

impl AsymmetryRow {
    pub fn from_report(market: impl Into<String>, r: &crate::asymmetry::AsymmetryReport) -> Self {
        Self {
            market: market.into(),
            median_stat: r.median.statistic,
            median_p: r.median.p_value,
            wave_stat: r.wave.statistic,
            wave_p: r.wave.p_value,
            rrr_stat: r.rrr.statistic,
            rrr_p: r.rrr.p_value,
            n_surrogates: r.n_surrogates,
            seed: r.seed,
        }
    }
}

/// One cell of a `simulate` rejection-rate grid.
#[derive(Debug, Clone, Serialize)]
pub struct SimulationCell {
    pub test: String,
    pub kind: String,
    #[serde(serialize_with = "ser_sig6")]
    pub d: f64,
    #[serde(serialize_with = "ser_sig6")]
    pub phi_up: f64,
    #[serde(serialize_with = "ser_sig6")]
    pub phi_down: f64,
    #[serde(serialize_with = "ser_sig6")]
    pub sigma: f64,
    pub length: usize,
    pub replications: usize,
    #[serde(serialize_with = "ser_sig6")]
    pub alpha: f64,
    pub surrogates: usize,
    pub seed: u64,
    #[serde(serialize_with = "ser_sig6")]
    pub rejection_rate: f64,
}

// ---------------------------------------------------------------------------
// CSV renderings (one row per series or market)
// ---------------------------------------------------------------------------

pub fn unit_root_csv(rows: &[UnitRootRow]) -> String {
    let mut out = String::from("series,adf,adf_p,adf_lags,kpss,kpss_p,kpss_bandwidth\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.series,
            fmt_f64(r.adf_stat),
            r.adf_p.render(),
            r.adf_lags,
            fmt_f64(r.kpss_stat),
            r.kpss_p.render(),
            r.kpss_bandwidth
        ));
    }
    out
}

pub fn cointegration_csv(rows: &[CointegrationRow]) -> String {
    let mut out = String::from(
        "market,transmission,se,adf,adf_p,kpss,kpss_p,lw_d,lw_se,lw_m,gph_d,gph_se,gph_m,cointegrated\n",
    );
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            r.market,
            fmt_f64(r.transmission),
            fmt_f64(r.transmission_se),
            fmt_f64(r.residual_adf_stat),
            r.residual_adf_p.render(),
            fmt_f64(r.residual_kpss_stat),
            r.residual_kpss_p.render(),
            fmt_f64(r.lw.d_hat),
            fmt_f64(r.lw.se),
            r.lw.bandwidth,
            fmt_f64(r.gph.d_hat),
            fmt_f64(r.gph.se),
            r.gph.bandwidth,
            r.cointegrated
        ));
    }
    out
}

pub fn asymmetry_csv(rows: &[AsymmetryRow]) -> String {
    let mut out = String::from("market,median,median_p,wave,wave_p,rrr,rrr_p\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.market,
            fmt_f64(r.median_stat),
            fmt_f64(r.median_p),
            fmt_f64(r.wave_stat),
            fmt_f64(r.wave_p),
            fmt_f64(r.rrr_stat),
            fmt_f64(r.rrr_p)
        ));
    }
    out
}

pub fn ecm_csv(rows: &[EcmRow]) -> String {
    let mut out = String::from("market,lag_order,eta,eta_hac_se,residual_sd,warnings\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.market,
            r.lag_order,
            fmt_f64(r.eta),
            fmt_f64(r.eta_hac_se),
            fmt_f64(r.residual_sd),
            r.warnings.join("; ")
        ));
    }
    out
}

pub fn simulation_csv(cells: &[SimulationCell]) -> String {
    let mut out = String::from(
        "test,kind,d,phi_up,phi_down,sigma,length,replications,alpha,surrogates,seed,rejection_rate\n",
    );
    for c in cells {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}\n",
            c.test,
            c.kind,
            fmt_f64(c.d),
            fmt_f64(c.phi_up),
            fmt_f64(c.phi_down),
            fmt_f64(c.sigma),
            c.length,
            c.replications,
            fmt_f64(c.alpha),
            c.surrogates,
            c.seed,
            fmt_f64(c.rejection_rate)
        ));
    }
    out
}

/// Surrogate statistic distributions as a tidy CSV for plotting.
pub fn null_distribution_csv(report: &crate::asymmetry::NullDistributions) -> String {
    let mut out = String::from("test,value\n");
    for (name, values) in [
        ("median", &report.median),
        ("wave", &report.wave),
        ("rrr", &report.rrr),
    ] {
        for v in values {
            out.push_str(&format!("{name},{}\n", fmt_f64(*v)));
        }
    }
    out
}

/// JSON wrapper for a list of memory estimates (the `longmem` subcommand).
#[derive(Debug, Clone, Serialize)]
pub struct MemoryReport {
    pub label: String,
    pub nobs: usize,
    pub estimates: Vec<MemoryEstimate>,
}

/// JSON wrapper for an asymmetry report (the `asym` subcommand).
#[derive(Debug, Clone, Serialize)]
pub struct AsymmetryJson {
    pub label: String,
    pub nobs: usize,
    pub median: MonteCarloPValue,
    pub wave: MonteCarloPValue,
    pub rrr: MonteCarloPValue,
    pub n_surrogates: usize,
    pub seed: u64,
    pub rng: &'static str,
}
