//! Pipeline config file: `key = value` lines plus one `market` line per
//! market, with `#` comments. Paths are resolved against the config file's
//! directory.
//!
//! ```text
//! seed = 42
//! n_surrogates = 10000
//! output_dir = out
//! market belgium data/belgium.csv data/brent.csv
//! market us data/us.csv data/wti.csv value value
//! ```

use std::path::{Path, PathBuf};

use ectasym::longmemory::GphRegressor;
use ectasym::pipeline::{Formats, MarketSpec, PipelineConfig};
use ectasym::regression::{LagChoice, ResidualTable};

pub fn parse_config(text: &str, base_dir: &Path, output_dir: PathBuf) -> Result<PipelineConfig, String> {
    let mut cfg = PipelineConfig::new(Vec::new(), output_dir);
    let resolve = |p: &str| -> PathBuf {
        let path = PathBuf::from(p);
        if path.is_absolute() {
            path
        } else {
            base_dir.join(path)
        }
    };

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fail = |msg: String| format!("config line {}: {msg}", lineno + 1);

        if let Some(rest) = line.strip_prefix("market ") {
            let parts: Vec<&str> = rest.split_whitespace().collect();
            if parts.len() < 3 || parts.len() > 5 {
                return Err(fail(format!(
                    "expected 'market <label> <gas_csv> <oil_csv> [gas_column] [oil_column]', got '{line}'"
                )));
            }
            cfg.markets.push(MarketSpec {
                label: parts[0].to_string(),
                gas_csv: resolve(parts[1]),
                oil_csv: resolve(parts[2]),
                gas_column: parts.get(3).map(|s| s.to_string()),
                oil_column: parts.get(4).map(|s| s.to_string()),
            });
            continue;
        }

        let (key, value) = line
            .split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .ok_or_else(|| fail(format!("expected 'key = value' or 'market ...', got '{line}'")))?;
        let parse_usize = |v: &str| v.parse::<usize>().map_err(|_| fail(format!("'{v}' is not a count")));
        match key {
            "seed" => cfg.seed = value.parse().map_err(|_| fail(format!("'{value}' is not a seed")))?,
            "n_surrogates" | "surrogates" => cfg.n_surrogates = parse_usize(value)?,
            "output_dir" => cfg.output_dir = resolve(value),
            "formats" => cfg.formats = parse_formats(value).map_err(fail)?,
            "date_column" => cfg.date_column = value.to_string(),
            "date_format" => cfg.date_format = value.to_string(),
            "lw_bandwidth" => cfg.lw_bandwidth = Some(parse_usize(value)?),
            "gph_bandwidth" => cfg.gph_bandwidth = Some(parse_usize(value)?),
            "hac_bandwidth" => cfg.hac_bandwidth = Some(parse_usize(value)?),
            "kpss_bandwidth" => cfg.kpss_bandwidth = Some(parse_usize(value)?),
            "adf_lags" => cfg.adf_lags = Some(parse_usize(value)?),
            "ecm_lags" => cfg.ecm_lags = parse_ecm_lags(value).map_err(fail)?,
            "gph_regressor" => {
                cfg.gph_regressor = match value {
                    "exact" => GphRegressor::Exact,
                    "asymptotic" => GphRegressor::Asymptotic,
                    other => return Err(fail(format!("unknown gph_regressor '{other}'"))),
                }
            }
            "residual_pvalue" => {
                cfg.residual_table = match value {
                    "engle-granger" => ResidualTable::EngleGranger,
                    "plain" => ResidualTable::PlainAdf,
                    other => return Err(fail(format!("unknown residual_pvalue '{other}'"))),
                }
            }
            "dump_null" => cfg.dump_null = parse_bool(value).map_err(fail)?,
            "force" => cfg.force = parse_bool(value).map_err(fail)?,
            "contemporaneous" => cfg.ecm_contemporaneous = parse_bool(value).map_err(fail)?,
            other => return Err(fail(format!("unknown key '{other}'"))),
        }
    }

    if cfg.markets.is_empty() {
        return Err("config contains no market lines".to_string());
    }
    Ok(cfg)
}

pub fn parse_formats(value: &str) -> Result<Formats, String> {
    let mut f = Formats { json: false, csv: false };
    for item in value.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        match item {
            "json" => f.json = true,
            "csv" => f.csv = true,
            other => return Err(format!("unknown format '{other}' (expected json, csv)")),
        }
    }
    if !f.json && !f.csv {
        return Err("at least one output format is required".to_string());
    }
    Ok(f)
}

pub fn parse_ecm_lags(value: &str) -> Result<LagChoice, String> {
    if value.eq_ignore_ascii_case("aic") {
        Ok(LagChoice::Aic)
    } else {
        value
            .parse::<usize>()
            .map(LagChoice::Fixed)
            .map_err(|_| format!("ecm lags must be a count or 'aic', got '{value}'"))
    }
}

fn parse_bool(value: &str) -> Result<bool, String> {
    match value {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        other => Err(format!("expected true/false, got '{other}'")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_full_config() {
        let text = "\
# demo
seed = 7
n_surrogates = 500
formats = json,csv
lw_bandwidth = 60
ecm_lags = aic
residual_pvalue = plain
market belgium gas.csv data/brent.csv
market us us.csv wti.csv gascol oilcol
";
        let cfg = parse_config(text, Path::new("/base"), PathBuf::from("out")).unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.n_surrogates, 500);
        assert_eq!(cfg.lw_bandwidth, Some(60));
        assert_eq!(cfg.ecm_lags, LagChoice::Aic);
        assert_eq!(cfg.residual_table, ResidualTable::PlainAdf);
        assert_eq!(cfg.markets.len(), 2);
        assert_eq!(cfg.markets[0].gas_csv, PathBuf::from("/base/gas.csv"));
        assert_eq!(cfg.markets[1].oil_column.as_deref(), Some("oilcol"));
    }

    #[test]
    fn rejects_unknown_keys_and_empty_configs() {
        assert!(parse_config("bogus = 1\nmarket a b c\n", Path::new("."), "o".into()).is_err());
        assert!(parse_config("seed = 1\n", Path::new("."), "o".into()).is_err());
        assert!(parse_config("market a b\n", Path::new("."), "o".into()).is_err());
    }

    #[test]
    fn single_format_selection() {
        let f = parse_formats("json").unwrap();
        assert!(f.json && !f.csv);
        assert!(parse_formats("").is_err());
        assert!(parse_formats("xml").is_err());
    }
}
