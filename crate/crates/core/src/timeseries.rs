//! Core data model: dated series, CSV ingestion, gap repair, alignment and
//! elementary transforms.

use std::io::{Read, Write};

use chrono::NaiveDate;

use crate::error::{Error, Result};

/// Smallest aligned sample any downstream estimator accepts.
pub const MIN_ALIGNED_LEN: usize = 30;

/// A dated, evenly spaced observation sequence. Gaps (missing value cells)
/// are carried as NaN until [`fill_missing`] repairs them; `imputed` marks
/// the repaired positions afterwards.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceSeries {
    pub label: String,
    pub timestamps: Vec<NaiveDate>,
    pub values: Vec<f64>,
    pub imputed: Vec<bool>,
    /// Non-fatal ingestion notes (irregular spacing and the like).
    pub warnings: Vec<String>,
}

impl PriceSeries {
    pub fn new(
        label: impl Into<String>,
        timestamps: Vec<NaiveDate>,
        values: Vec<f64>,
    ) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput);
        }
        if timestamps.len() != values.len() {
            return Err(Error::LengthMismatch(format!(
                "{} timestamps vs {} values",
                timestamps.len(),
                values.len()
            )));
        }
        for w in timestamps.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::DuplicateTimestamp(w[1].to_string()));
            }
        }
        if values.iter().any(|v| v.is_infinite()) {
            return Err(Error::InvalidParameter("non-finite value in series".into()));
        }
        let n = values.len();
        Ok(Self {
            label: label.into(),
            timestamps,
            values,
            imputed: vec![false; n],
            warnings: Vec::new(),
        })
    }

    /// Convenience constructor with weekly timestamps starting at `start`.
    pub fn weekly(label: impl Into<String>, start: NaiveDate, values: Vec<f64>) -> Result<Self> {
        let timestamps = (0..values.len() as i64)
            .map(|k| start + chrono::Duration::weeks(k))
            .collect();
        Self::new(label, timestamps, values)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn has_gaps(&self) -> bool {
        self.values.iter().any(|v| v.is_nan())
    }

    fn require_repaired(&self) -> Result<()> {
        if self.has_gaps() {
            Err(Error::GapsPresent)
        } else {
            Ok(())
        }
    }
}

/// Two repaired series restricted to their shared timestamps.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignedPair {
    pub y: Vec<f64>,
    pub x: Vec<f64>,
    pub timestamps: Vec<NaiveDate>,
}

/// Parse a delimited byte stream into a [`PriceSeries`]. Rows are sorted by
/// date after parsing; empty value cells become gaps; duplicate dates and
/// unparseable cells are errors naming the offending line.
pub fn ingest_csv<R: Read>(
    source: R,
    date_column: &str,
    value_column: &str,
    date_format: &str,
    label: &str,
) -> Result<PriceSeries> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(source);

    let headers = reader
        .headers()
        .map_err(|e| Error::CsvParse {
            line: 1,
            message: e.to_string(),
        })?
        .clone();
    let date_idx = headers
        .iter()
        .position(|h| h == date_column)
        .ok_or_else(|| Error::CsvParse {
            line: 1,
            message: format!("no column named '{date_column}'"),
        })?;
    let value_idx = headers
        .iter()
        .position(|h| h == value_column)
        .ok_or_else(|| Error::CsvParse {
            line: 1,
            message: format!("no column named '{value_column}'"),
        })?;

    let mut rows: Vec<(NaiveDate, f64)> = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::CsvParse {
            line: i as u64 + 2,
            message: e.to_string(),
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(i as u64 + 2);
        let date_cell = record.get(date_idx).unwrap_or("");
        let date = NaiveDate::parse_from_str(date_cell, date_format).map_err(|e| {
            Error::CsvParse {
                line,
                message: format!("cannot parse date '{date_cell}' with '{date_format}': {e}"),
            }
        })?;
        let value_cell = record.get(value_idx).unwrap_or("");
        let value = if value_cell.is_empty() {
            f64::NAN // gap, repaired later
        } else {
            value_cell.parse::<f64>().map_err(|_| Error::CsvParse {
                line,
                message: format!("cannot parse value '{value_cell}'"),
            })?
        };
        rows.push((date, value));
    }
    if rows.is_empty() {
        return Err(Error::EmptyInput);
    }
    rows.sort_by_key(|(d, _)| *d);
    for w in rows.windows(2) {
        if w[0].0 == w[1].0 {
            return Err(Error::DuplicateTimestamp(w[0].0.to_string()));
        }
    }
    if rows.iter().all(|(_, v)| v.is_nan()) {
        return Err(Error::EmptyInput);
    }

    let timestamps: Vec<NaiveDate> = rows.iter().map(|(d, _)| *d).collect();
    let values: Vec<f64> = rows.iter().map(|(_, v)| *v).collect();
    let warnings = spacing_warnings(&timestamps);
    let n = values.len();
    Ok(PriceSeries {
        label: label.to_string(),
        timestamps,
        values,
        imputed: vec![false; n],
        warnings,
    })
}

/// Spacing is asserted as the modal step; deviations warn rather than fail
/// since real weekly files contain holiday shifts.
fn spacing_warnings(timestamps: &[NaiveDate]) -> Vec<String> {
    if timestamps.len() < 3 {
        return Vec::new();
    }
    let steps: Vec<i64> = timestamps
        .windows(2)
        .map(|w| (w[1] - w[0]).num_days())
        .collect();
    let mut counts = std::collections::BTreeMap::new();
    for s in &steps {
        *counts.entry(*s).or_insert(0usize) += 1;
    }
    let (&modal, _) = counts.iter().max_by_key(|(_, c)| **c).unwrap();
    let irregular = steps.iter().filter(|s| **s != modal).count();
    if irregular > 0 {
        vec![format!(
            "{irregular} of {} steps deviate from the modal spacing of {modal} days",
            steps.len()
        )]
    } else {
        Vec::new()
    }
}

/// Repair interior gaps by linear interpolation between the nearest
/// non-missing neighbours. Gaps touching either boundary are refused.
/// Idempotent, and never touches non-missing values.
pub fn fill_missing(series: &PriceSeries) -> Result<PriceSeries> {
    let values = &series.values;
    let n = values.len();
    if values.iter().filter(|v| !v.is_nan()).count() < 2 {
        return Err(Error::TooShort { len: n, min: 2 });
    }
    if values[0].is_nan() {
        return Err(Error::BoundaryGap(0));
    }
    if values[n - 1].is_nan() {
        return Err(Error::BoundaryGap(n - 1));
    }

    let mut out = values.clone();
    let mut imputed = series.imputed.clone();
    let mut i = 0;
    while i < n {
        if !out[i].is_nan() {
            i += 1;
            continue;
        }
        // run of gaps [i, j); neighbours at i-1 and j are non-missing
        let mut j = i;
        while out[j].is_nan() {
            j += 1;
        }
        let left = out[i - 1];
        let right = out[j];
        let span = (j - (i - 1)) as f64;
        for (step, slot) in (i..j).enumerate() {
            let frac = (step + 1) as f64 / span;
            out[slot] = left + frac * (right - left);
            imputed[slot] = true;
        }
        i = j;
    }

    Ok(PriceSeries {
        label: series.label.clone(),
        timestamps: series.timestamps.clone(),
        values: out,
        imputed,
        warnings: series.warnings.clone(),
    })
}

/// Element-wise natural logarithm; requires a repaired, strictly positive series.
pub fn log_series(series: &PriceSeries) -> Result<PriceSeries> {
    series.require_repaired()?;
    for (i, v) in series.values.iter().enumerate() {
        if *v <= 0.0 {
            return Err(Error::NonPositive { index: i, value: *v });
        }
    }
    let mut out = series.clone();
    out.values = series.values.iter().map(|v| v.ln()).collect();
    Ok(out)
}

/// First differences. Length drops by one; each result is stamped with the
/// later date and marked imputed when either endpoint was.
pub fn diff_series(series: &PriceSeries) -> Result<PriceSeries> {
    series.require_repaired()?;
    let n = series.len();
    if n < 2 {
        return Err(Error::TooShort { len: n, min: 2 });
    }
    let values = series.values.windows(2).map(|w| w[1] - w[0]).collect();
    let imputed = series.imputed.windows(2).map(|w| w[0] || w[1]).collect();
    Ok(PriceSeries {
        label: series.label.clone(),
        timestamps: series.timestamps[1..].to_vec(),
        values,
        imputed,
        warnings: series.warnings.clone(),
    })
}

/// Restrict two repaired series to their shared timestamps, order preserved.
pub fn align(a: &PriceSeries, b: &PriceSeries) -> Result<AlignedPair> {
    a.require_repaired()?;
    b.require_repaired()?;

    let mut y = Vec::new();
    let mut x = Vec::new();
    let mut timestamps = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a.timestamps[i].cmp(&b.timestamps[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                y.push(a.values[i]);
                x.push(b.values[j]);
                timestamps.push(a.timestamps[i]);
                i += 1;
                j += 1;
            }
        }
    }
    if timestamps.len() < MIN_ALIGNED_LEN {
        return Err(Error::SampleTooSmall {
            len: timestamps.len(),
            min: MIN_ALIGNED_LEN,
        });
    }
    Ok(AlignedPair { y, x, timestamps })
}

/// Write a repaired series as `date,value,imputed` with imputed encoded 0/1.
pub fn write_series_csv<W: Write>(series: &PriceSeries, mut out: W) -> Result<()> {
    writeln!(out, "date,value,imputed")?;
    for i in 0..series.len() {
        writeln!(
            out,
            "{},{},{}",
            series.timestamps[i],
            crate::report::sig6(series.values[i]),
            u8::from(series.imputed[i])
        )?;
    }
    Ok(())
}

/// Name of the single non-date column of a headered CSV; ambiguity is an
/// error asking for an explicit column name.
pub fn single_value_column<R: Read>(source: R, date_column: &str) -> Result<String> {
    let mut reader = csv::ReaderBuilder::new().from_reader(source);
    let headers = reader
        .headers()
        .map_err(|e| Error::CsvParse {
            line: 1,
            message: e.to_string(),
        })?
        .clone();
    let candidates: Vec<String> = headers
        .iter()
        .filter(|h| *h != date_column && !h.eq_ignore_ascii_case("imputed"))
        .map(|h| h.to_string())
        .collect();
    match candidates.as_slice() {
        [one] => Ok(one.clone()),
        [] => Err(Error::CsvParse {
            line: 1,
            message: "no value column found".into(),
        }),
        _ => Err(Error::CsvParse {
            line: 1,
            message: format!(
                "several value columns ({}); name one explicitly",
                candidates.join(", ")
            ),
        }),
    }
}

/// Read one numeric column from a headered CSV, in row order. When `column`
/// is `None` the single non-date column is used; ambiguity is an error.
pub fn read_value_column<R: Read>(source: R, column: Option<&str>) -> Result<Vec<f64>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(source);
    let headers = reader
        .headers()
        .map_err(|e| Error::CsvParse {
            line: 1,
            message: e.to_string(),
        })?
        .clone();

    let idx = match column {
        Some(name) => headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::CsvParse {
                line: 1,
                message: format!("no column named '{name}'"),
            })?,
        None => {
            let candidates: Vec<usize> = headers
                .iter()
                .enumerate()
                .filter(|(_, h)| {
                    let h = h.to_ascii_lowercase();
                    h != "date" && h != "imputed" && h != "timestamp"
                })
                .map(|(i, _)| i)
                .collect();
            match candidates.as_slice() {
                [one] => *one,
                [] => {
                    return Err(Error::CsvParse {
                        line: 1,
                        message: "no value column found".into(),
                    })
                }
                _ => {
                    return Err(Error::CsvParse {
                        line: 1,
                        message: "several value columns; pass the column name".into(),
                    })
                }
            }
        }
    };

    let mut values = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::CsvParse {
            line: i as u64 + 2,
            message: e.to_string(),
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(i as u64 + 2);
        let cell = record.get(idx).unwrap_or("");
        let v = cell.parse::<f64>().map_err(|_| Error::CsvParse {
            line,
            message: format!("cannot parse value '{cell}'"),
        })?;
        values.push(v);
    }
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(values)
}
