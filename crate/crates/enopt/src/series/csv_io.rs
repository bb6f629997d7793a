//! CSV ingestion and output.
//!
//! The ingestion format is one header row with a timestamp column (ISO 8601,
//! UTC) and one value column per meter; empty cells are missing values.
//! Rows are sorted by timestamp on the way in, duplicates are rejected, and
//! a non-uniform grid after sorting is an error.

use std::path::Path;

use chrono::{DateTime, Duration, SecondsFormat, Utc};

use super::{MeterRecord, TimeSeries};
use crate::{Error, Result};

/// Declares how to read a meter CSV file.
#[derive(Debug, Clone)]
pub struct CsvSchema {
    pub timestamp_column: String,
    /// Columns to ingest; `None` ingests every non-timestamp column.
    pub value_columns: Option<Vec<String>>,
    /// Unit label applied to all ingested series.
    pub unit: String,
}

impl CsvSchema {
    pub fn half_hourly_kwh(timestamp_column: impl Into<String>) -> Self {
        Self {
            timestamp_column: timestamp_column.into(),
            value_columns: None,
            unit: "kWh".into(),
        }
    }
}

/// Reads a CSV file into one [`MeterRecord`] per value column.
pub fn ingest_csv(path: impl AsRef<Path>, schema: &CsvSchema) -> Result<Vec<MeterRecord>> {
    let path = path.as_ref();
    let display = path.display().to_string();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| Error::InvalidInput(format!("cannot open {display}: {e}")))?;

    let headers = reader
        .headers()
        .map_err(|e| Error::Parse {
            path: display.clone(),
            row: 1,
            detail: e.to_string(),
        })?
        .clone();
    let ts_col = headers
        .iter()
        .position(|h| h == schema.timestamp_column)
        .ok_or_else(|| Error::InvalidInput(format!(
            "{display}: timestamp column '{}' not in header",
            schema.timestamp_column
        )))?;

    let wanted: Vec<(usize, String)> = match &schema.value_columns {
        Some(cols) => cols
            .iter()
            .map(|name| {
                headers
                    .iter()
                    .position(|h| h == name)
                    .map(|idx| (idx, name.clone()))
                    .ok_or_else(|| Error::InvalidInput(format!(
                        "{display}: value column '{name}' not in header"
                    )))
            })
            .collect::<Result<_>>()?,
        None => headers
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != ts_col)
            .map(|(i, h)| (i, h.to_string()))
            .collect(),
    };
    if wanted.is_empty() {
        return Err(Error::InvalidInput(format!(
            "{display}: no value columns to ingest"
        )));
    }

    let mut rows: Vec<(DateTime<Utc>, Vec<f64>)> = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let row_no = line + 2; // header is row 1
        let record = record.map_err(|e| Error::Parse {
            path: display.clone(),
            row: row_no,
            detail: e.to_string(),
        })?;
        let ts_text = record.get(ts_col).unwrap_or("");
        let ts = parse_timestamp(ts_text).ok_or_else(|| Error::Parse {
            path: display.clone(),
            row: row_no,
            detail: format!("unparseable timestamp '{ts_text}'"),
        })?;
        let mut values = Vec::with_capacity(wanted.len());
        for (idx, name) in &wanted {
            let cell = record.get(*idx).unwrap_or("").trim();
            let v = if cell.is_empty() {
                f64::NAN
            } else {
                cell.parse::<f64>().map_err(|_| Error::Parse {
                    path: display.clone(),
                    row: row_no,
                    detail: format!("unparseable value '{cell}' in column '{name}'"),
                })?
            };
            values.push(v);
        }
        rows.push((ts, values));
    }
    if rows.is_empty() {
        return Err(Error::InvalidInput(format!("{display}: no data rows")));
    }

    rows.sort_by_key(|(ts, _)| *ts);
    for pair in rows.windows(2) {
        if pair[0].0 == pair[1].0 {
            return Err(Error::InvalidInput(format!(
                "{display}: duplicate timestamp {}",
                pair[0].0
            )));
        }
    }

    let resolution = if rows.len() == 1 {
        Duration::minutes(30)
    } else {
        rows[1].0 - rows[0].0
    };
    for (k, pair) in rows.windows(2).enumerate() {
        if pair[1].0 - pair[0].0 != resolution {
            return Err(Error::InvalidInput(format!(
                "{display}: non-uniform spacing between rows {} and {} \
                 ({} vs {resolution}); resample to a single resolution first",
                k + 2,
                k + 3,
                pair[1].0 - pair[0].0
            )));
        }
    }

    let start = rows[0].0;
    wanted
        .iter()
        .enumerate()
        .map(|(col, (_, name))| {
            let values: Vec<f64> = rows.iter().map(|(_, vs)| vs[col]).collect();
            let series = TimeSeries::new(start, resolution, values, schema.unit.clone())?;
            Ok(MeterRecord::new(name.clone(), series))
        })
        .collect()
}

fn parse_timestamp(text: &str) -> Option<DateTime<Utc>> {
    DateTime::parse_from_rfc3339(text)
        .ok()
        .map(|dt| dt.with_timezone(&Utc))
}

/// Writes aligned series as one CSV table: a `timestamp` column plus one
/// column per series. Missing values become empty cells.
pub fn write_series_csv(path: impl AsRef<Path>, columns: &[(&str, &TimeSeries)]) -> Result<()> {
    let path = path.as_ref();
    let Some((_, first)) = columns.first() else {
        return Err(Error::InvalidInput("nothing to write".into()));
    };
    for (name, s) in columns {
        first.check_aligned(s, &format!("write_series_csv column '{name}'"))?;
    }
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["timestamp".to_string()];
    header.extend(columns.iter().map(|(name, _)| name.to_string()));
    w.write_record(&header)?;
    for k in 0..first.len() {
        let mut row = vec![first
            .timestamp(k)
            .to_rfc3339_opts(SecondsFormat::Secs, true)];
        for (_, s) in columns {
            let v = s.value(k);
            row.push(if v.is_nan() { String::new() } else { format!("{v}") });
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}
