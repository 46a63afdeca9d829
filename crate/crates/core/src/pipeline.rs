//! End-to-end orchestration: per market, ingest and repair both price
//! series, test the log levels, fit the long-run relationship, measure the
//! deviation series' memory, run the asymmetry battery, and emit one
//! machine-readable report per table plus run metadata.
//!
//! Reports depend only on the config (including the base seed), never on
//! wall-clock or scheduling, so identical configs emit identical bytes.

use std::fs;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use rayon::prelude::*;
use serde::Serialize;

use crate::asymmetry::{asym_report_with_null, NullDistributions};
use crate::error::{Error, Result};
use crate::hypothesis::{adf, kpss, Deterministic, KpssCase};
use crate::longmemory::{gph, local_whittle, GphRegressor};
use crate::regression::{ecm, engle_granger, EcmOptions, EgOptions, LagChoice, ResidualTable};
use crate::report::{
    asymmetry_csv, cointegration_csv, ecm_csv, null_distribution_csv, unit_root_csv, AsymmetryRow,
    CointegrationRow, EcmRow, UnitRootRow,
};
use crate::surrogate::RNG_NAME;
use crate::timeseries::{align, fill_missing, ingest_csv, PriceSeries};
use crate::util::fnv1a64;

#[derive(Debug, Clone)]
pub struct MarketSpec {
    pub label: String,
    pub gas_csv: PathBuf,
    pub oil_csv: PathBuf,
    /// Value column names; `None` auto-detects the single non-date column.
    pub gas_column: Option<String>,
    pub oil_column: Option<String>,
}

#[derive(Debug, Clone, Copy)]
pub struct Formats {
    pub json: bool,
    pub csv: bool,
}

impl Default for Formats {
    fn default() -> Self {
        Self { json: true, csv: true }
    }
}

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub markets: Vec<MarketSpec>,
    pub output_dir: PathBuf,
    pub seed: u64,
    pub n_surrogates: usize,
    pub formats: Formats,
    pub date_column: String,
    pub date_format: String,
    pub lw_bandwidth: Option<usize>,
    pub gph_bandwidth: Option<usize>,
    pub gph_regressor: GphRegressor,
    pub hac_bandwidth: Option<usize>,
    pub kpss_bandwidth: Option<usize>,
    pub adf_lags: Option<usize>,
    pub ecm_lags: LagChoice,
    pub ecm_contemporaneous: bool,
    pub residual_table: ResidualTable,
    pub dump_null: bool,
    pub force: bool,
}

impl PipelineConfig {
    pub fn new(markets: Vec<MarketSpec>, output_dir: impl Into<PathBuf>) -> Self {
        Self {
            markets,
            output_dir: output_dir.into(),
            seed: 42,
            n_surrogates: 10_000,
            formats: Formats::default(),
            date_column: "date".to_string(),
            date_format: "%Y-%m-%d".to_string(),
            lw_bandwidth: None,
            gph_bandwidth: None,
            gph_regressor: GphRegressor::Exact,
            hac_bandwidth: None,
            kpss_bandwidth: None,
            adf_lags: None,
            ecm_lags: LagChoice::Fixed(4),
            ecm_contemporaneous: false,
            residual_table: ResidualTable::EngleGranger,
            dump_null: false,
            force: false,
        }
    }

    /// Seed for one market, derived from the base seed and the label so that
    /// adding or removing another market never shifts this market's numbers.
    pub fn market_seed(&self, label: &str) -> u64 {
        self.seed ^ fnv1a64(label)
    }
}

struct MarketOutput {
    label: String,
    gas_row: UnitRootRow,
    oil_key: String,
    oil_row: UnitRootRow,
    coint: CointegrationRow,
    ecm: EcmRow,
    asym: AsymmetryRow,
    prices: Vec<(NaiveDate, f64, f64, bool, bool)>,
    ect: Vec<(NaiveDate, f64)>,
    nulls: Option<NullDistributions>,
}

#[derive(Debug)]
pub struct PipelineOutcome {
    pub completed: Vec<String>,
    pub failures: Vec<(String, String)>,
    pub files: Vec<PathBuf>,
}

impl PipelineOutcome {
    pub fn all_succeeded(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Serialize)]
struct MarketMeta {
    label: String,
    gas_csv: String,
    oil_csv: String,
    seed: u64,
}

#[derive(Serialize)]
struct FailureMeta {
    market: String,
    error: String,
}

#[derive(Serialize)]
struct RunMetadata {
    tool: &'static str,
    version: &'static str,
    rng: &'static str,
    seed: u64,
    n_surrogates: usize,
    date_column: String,
    date_format: String,
    adf_lags: String,
    kpss_bandwidth: String,
    hac_bandwidth: String,
    lw_bandwidth: String,
    gph_bandwidth: String,
    gph_regressor: String,
    residual_pvalue_table: String,
    ecm_lags: String,
    ecm_contemporaneous: bool,
    markets: Vec<MarketMeta>,
    failures: Vec<FailureMeta>,
}

fn or_auto(value: Option<usize>, rule: &str) -> String {
    match value {
        Some(v) => v.to_string(),
        None => format!("auto: {rule}"),
    }
}

fn load_series(
    path: &Path,
    column: Option<&str>,
    label: &str,
    cfg: &PipelineConfig,
) -> Result<PriceSeries> {
    let file = fs::File::open(path)?;
    let value_column = match column {
        Some(c) => c.to_string(),
        None => detect_value_column(path, &cfg.date_column)?,
    };
    let raw = ingest_csv(file, &cfg.date_column, &value_column, &cfg.date_format, label)?;
    fill_missing(&raw)
}

fn detect_value_column(path: &Path, date_column: &str) -> Result<String> {
    let file = fs::File::open(path)?;
    crate::timeseries::single_value_column(file, date_column).map_err(|e| match e {
        Error::CsvParse { line, message } => Error::CsvParse {
            line,
            message: format!("{}: {message}", path.display()),
        },
        other => other,
    })
}

fn log_values(values: &[f64]) -> Result<Vec<f64>> {
    values
        .iter()
        .enumerate()
        .map(|(i, v)| {
            if *v <= 0.0 {
                Err(Error::NonPositive { index: i, value: *v })
            } else {
                Ok(v.ln())
            }
        })
        .collect()
}

fn file_stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn process_market(cfg: &PipelineConfig, market: &MarketSpec) -> Result<MarketOutput> {
    let gas = load_series(&market.gas_csv, market.gas_column.as_deref(), &market.label, cfg)?;
    let oil_label = file_stem(&market.oil_csv);
    let oil = load_series(&market.oil_csv, market.oil_column.as_deref(), &oil_label, cfg)?;

    let pair = align(&gas, &oil)?;
    let log_gas = log_values(&pair.y)?;
    let log_oil = log_values(&pair.x)?;

    // unit-root table on the aligned log levels
    let gas_adf = adf(&log_gas, Deterministic::Constant, cfg.adf_lags)?;
    let gas_kpss = kpss(&log_gas, KpssCase::Level, cfg.kpss_bandwidth)?;
    let oil_adf = adf(&log_oil, Deterministic::Constant, cfg.adf_lags)?;
    let oil_kpss = kpss(&log_oil, KpssCase::Level, cfg.kpss_bandwidth)?;

    let eg_opts = EgOptions {
        force: cfg.force,
        hac_bandwidth: cfg.hac_bandwidth,
        adf_lags: cfg.adf_lags,
        kpss_bandwidth: cfg.kpss_bandwidth,
        residual_table: cfg.residual_table,
    };
    let fit = engle_granger(&log_gas, &log_oil, &eg_opts)?;

    let lw = local_whittle(&fit.ect, cfg.lw_bandwidth)?;
    let gph_est = gph(&fit.ect, cfg.gph_bandwidth, cfg.gph_regressor)?;

    let mut ecm_fit = ecm(
        &log_gas,
        &log_oil,
        &fit.ect,
        &EcmOptions {
            lags: cfg.ecm_lags,
            contemporaneous: cfg.ecm_contemporaneous,
            hac_bandwidth: cfg.hac_bandwidth,
        },
    )?;
    ecm_fit.flag_long_memory(lw.d_hat);

    let seed = cfg.market_seed(&market.label);
    let (asym, nulls) = asym_report_with_null(&fit.ect, cfg.n_surrogates, seed)?;

    // imputation flags looked up per aligned timestamp
    let flag = |s: &PriceSeries, ts: &NaiveDate| -> bool {
        s.timestamps
            .binary_search(ts)
            .map(|i| s.imputed[i])
            .unwrap_or(false)
    };
    let prices = pair
        .timestamps
        .iter()
        .enumerate()
        .map(|(i, ts)| (*ts, pair.y[i], pair.x[i], flag(&gas, ts), flag(&oil, ts)))
        .collect();
    let ect_series = pair
        .timestamps
        .iter()
        .zip(&fit.ect)
        .map(|(ts, e)| (*ts, *e))
        .collect();

    Ok(MarketOutput {
        label: market.label.clone(),
        gas_row: UnitRootRow::from_results(market.label.clone(), &gas_adf, &gas_kpss),
        oil_key: market.oil_csv.display().to_string(),
        oil_row: UnitRootRow::from_results(oil_label, &oil_adf, &oil_kpss),
        coint: CointegrationRow {
            market: market.label.clone(),
            transmission: fit.transmission,
            transmission_se: fit.hac_se[1],
            intercept: fit.intercept,
            intercept_se: fit.hac_se[0],
            residual_adf_stat: fit.residual_adf.statistic,
            residual_adf_p: fit.residual_adf.p_value,
            residual_adf_lags: fit.residual_adf.nuisance,
            residual_kpss_stat: fit.residual_kpss.statistic,
            residual_kpss_p: fit.residual_kpss.p_value,
            residual_kpss_bandwidth: fit.residual_kpss.nuisance,
            lw,
            gph: gph_est,
            cointegrated: fit.cointegrated,
            critical_values: fit.residual_adf.detail.clone(),
            warnings: fit.warnings.clone(),
        },
        ecm: EcmRow {
            market: market.label.clone(),
            lag_order: ecm_fit.lag_order,
            intercept: ecm_fit.intercept,
            eta: ecm_fit.eta,
            eta_hac_se: ecm_fit.eta_hac_se,
            residual_sd: ecm_fit.residual_sd,
            nobs: ecm_fit.nobs,
            warnings: ecm_fit.warnings.clone(),
        },
        asym: AsymmetryRow::from_report(market.label.clone(), &asym),
        prices,
        ect: ect_series,
        nulls: cfg.dump_null.then_some(nulls),
    })
}

fn write_text(path: &Path, text: &str, files: &mut Vec<PathBuf>) -> Result<()> {
    fs::write(path, text)?;
    files.push(path.to_path_buf());
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T, files: &mut Vec<PathBuf>) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::InvalidParameter(format!("serialization failed: {e}")))?;
    text.push('\n');
    write_text(path, &text, files)
}

/// Run the full pipeline. Per-market failures are isolated: the remaining
/// markets complete, the failure lands in the metadata report, and the
/// outcome lists it. Statistical outcomes never fail the run.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<PipelineOutcome> {
    if cfg.markets.is_empty() {
        return Err(Error::InvalidParameter("no markets configured".into()));
    }
    for m in &cfg.markets {
        if m.gas_csv == m.oil_csv {
            return Err(Error::InvalidParameter(format!(
                "market {}: gas and oil paths must differ",
                m.label
            )));
        }
    }
    fs::create_dir_all(&cfg.output_dir)?;
    fs::create_dir_all(cfg.output_dir.join("series"))?;
    if cfg.dump_null {
        fs::create_dir_all(cfg.output_dir.join("null"))?;
    }

    let results: Vec<(usize, std::result::Result<MarketOutput, String>)> = cfg
        .markets
        .par_iter()
        .enumerate()
        .map(|(i, m)| (i, process_market(cfg, m).map_err(|e| e.to_string())))
        .collect();

    let mut outputs: Vec<MarketOutput> = Vec::new();
    let mut failures: Vec<(String, String)> = Vec::new();
    let mut ordered: Vec<(usize, std::result::Result<MarketOutput, String>)> = results;
    ordered.sort_by_key(|(i, _)| *i);
    for (i, r) in ordered {
        match r {
            Ok(out) => outputs.push(out),
            Err(e) => failures.push((cfg.markets[i].label.clone(), e)),
        }
    }

    // assemble tables in config order; oil rows deduplicated by path
    let mut unit_rows: Vec<UnitRootRow> = outputs.iter().map(|o| o.gas_row.clone()).collect();
    let mut seen_oils = std::collections::BTreeSet::new();
    for o in &outputs {
        if seen_oils.insert(o.oil_key.clone()) {
            unit_rows.push(o.oil_row.clone());
        }
    }
    let coint_rows: Vec<CointegrationRow> = outputs.iter().map(|o| o.coint.clone()).collect();
    let ecm_rows: Vec<EcmRow> = outputs.iter().map(|o| o.ecm.clone()).collect();
    let asym_rows: Vec<AsymmetryRow> = outputs.iter().map(|o| o.asym.clone()).collect();

    let mut files = Vec::new();
    let dir = &cfg.output_dir;
    if cfg.formats.json {
        write_json(&dir.join("unit_root.json"), &unit_rows, &mut files)?;
        write_json(&dir.join("cointegration.json"), &coint_rows, &mut files)?;
        write_json(&dir.join("ecm.json"), &ecm_rows, &mut files)?;
        write_json(&dir.join("asymmetry.json"), &asym_rows, &mut files)?;
    }
    if cfg.formats.csv {
        write_text(&dir.join("unit_root.csv"), &unit_root_csv(&unit_rows), &mut files)?;
        write_text(
            &dir.join("cointegration.csv"),
            &cointegration_csv(&coint_rows),
            &mut files,
        )?;
        write_text(&dir.join("ecm.csv"), &ecm_csv(&ecm_rows), &mut files)?;
        write_text(&dir.join("asymmetry.csv"), &asymmetry_csv(&asym_rows), &mut files)?;
    }

    for o in &outputs {
        let mut prices = String::from("date,gas,oil,gas_imputed,oil_imputed\n");
        for (ts, g, x, gi, oi) in &o.prices {
            prices.push_str(&format!(
                "{ts},{},{},{},{}\n",
                crate::report::fmt_f64(*g),
                crate::report::fmt_f64(*x),
                u8::from(*gi),
                u8::from(*oi)
            ));
        }
        write_text(&dir.join("series").join(format!("{}_prices.csv", o.label)), &prices, &mut files)?;

        let mut ect = String::from("date,ect\n");
        for (ts, e) in &o.ect {
            ect.push_str(&format!("{ts},{}\n", crate::report::fmt_f64(*e)));
        }
        write_text(&dir.join("series").join(format!("{}_ect.csv", o.label)), &ect, &mut files)?;

        if let Some(nulls) = &o.nulls {
            write_text(
                &dir.join("null").join(format!("{}_null.csv", o.label)),
                &null_distribution_csv(nulls),
                &mut files,
            )?;
        }
    }

    let metadata = RunMetadata {
        tool: "ectasym",
        version: env!("CARGO_PKG_VERSION"),
        rng: RNG_NAME,
        seed: cfg.seed,
        n_surrogates: cfg.n_surrogates,
        date_column: cfg.date_column.clone(),
        date_format: cfg.date_format.clone(),
        adf_lags: or_auto(cfg.adf_lags, "AIC over 0..=floor(12*(T/100)^(1/4))"),
        kpss_bandwidth: or_auto(cfg.kpss_bandwidth, "floor(4*(T/100)^(1/4))"),
        hac_bandwidth: or_auto(cfg.hac_bandwidth, "floor(4*(T/100)^(2/9))"),
        lw_bandwidth: or_auto(cfg.lw_bandwidth, "floor(T^0.6)"),
        gph_bandwidth: or_auto(cfg.gph_bandwidth, "floor(T^0.6)"),
        gph_regressor: match cfg.gph_regressor {
            GphRegressor::Exact => "exact: -log(4 sin^2(lambda/2))".to_string(),
            GphRegressor::Asymptotic => "asymptotic: -2 log(lambda)".to_string(),
        },
        residual_pvalue_table: match cfg.residual_table {
            ResidualTable::EngleGranger => "engle-granger (2 variables)".to_string(),
            ResidualTable::PlainAdf => "plain adf (constant)".to_string(),
        },
        ecm_lags: match cfg.ecm_lags {
            LagChoice::Fixed(p) => format!("fixed: {p}"),
            LagChoice::Aic => "aic over 1..=8".to_string(),
        },
        ecm_contemporaneous: cfg.ecm_contemporaneous,
        markets: cfg
            .markets
            .iter()
            .map(|m| MarketMeta {
                label: m.label.clone(),
                gas_csv: m.gas_csv.display().to_string(),
                oil_csv: m.oil_csv.display().to_string(),
                seed: cfg.market_seed(&m.label),
            })
            .collect(),
        failures: failures
            .iter()
            .map(|(market, error)| FailureMeta {
                market: market.clone(),
                error: error.clone(),
            })
            .collect(),
    };
    write_json(&dir.join("run_metadata.json"), &metadata, &mut files)?;

    Ok(PipelineOutcome {
        completed: outputs.iter().map(|o| o.label.clone()).collect(),
        failures,
        files,
    })
}
