//! Time-series data model, CSV ingestion, cleaning, and accuracy metrics.
//!
//! [`TimeSeries`] is the universal carrier across the crate: uniformly
//! sampled values with a UTC start, a fixed resolution, and a free-form unit
//! label. Missing entries are `NaN`. All operations here are pure over
//! immutable inputs, so they parallelise per meter without coordination.

mod csv_io;
mod metrics;
mod ops;

pub use csv_io::{ingest_csv, write_series_csv, CsvSchema};
pub use metrics::{score, score_values, AccuracyReport};
pub use ops::{detect_anomalies, fill_gaps, filter_meters, resample, GapReport};

use std::collections::BTreeMap;

use chrono::{DateTime, Duration, Utc};

use crate::{Error, Result};

/// Uniformly sampled, timestamped value sequence. Entry `k` corresponds to
/// `start + k * resolution`; `NaN` marks a missing observation.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    start: DateTime<Utc>,
    resolution: Duration,
    values: Vec<f64>,
    unit: String,
}

impl TimeSeries {
    pub fn new(
        start: DateTime<Utc>,
        resolution: Duration,
        values: Vec<f64>,
        unit: impl Into<String>,
    ) -> Result<Self> {
        if resolution <= Duration::zero() {
            return Err(Error::InvalidInput("resolution must be positive".into()));
        }
        Ok(Self {
            start,
            resolution,
            values,
            unit: unit.into(),
        })
    }

    /// A series of `len` copies of `value`.
    pub fn constant(
        start: DateTime<Utc>,
        resolution: Duration,
        len: usize,
        value: f64,
        unit: impl Into<String>,
    ) -> Result<Self> {
        Self::new(start, resolution, vec![value; len], unit)
    }

    pub fn start(&self) -> DateTime<Utc> {
        self.start
    }

    pub fn resolution(&self) -> Duration {
        self.resolution
    }

    /// Step length in hours.
    pub fn resolution_hours(&self) -> f64 {
        self.resolution.num_milliseconds() as f64 / 3_600_000.0
    }

    pub fn unit(&self) -> &str {
        &self.unit
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, k: usize) -> f64 {
        self.values[k]
    }

    pub fn timestamp(&self, k: usize) -> DateTime<Utc> {
        self.start + self.resolution * (k as i32)
    }

    pub fn is_missing(&self, k: usize) -> bool {
        self.values[k].is_nan()
    }

    pub fn missing_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_nan()).count()
    }

    /// The values, guaranteed gap free.
    pub fn dense(&self) -> Result<&[f64]> {
        if let Some(k) = self.values.iter().position(|v| v.is_nan()) {
            return Err(Error::InvalidInput(format!(
                "series has a missing value at index {k} ({}); fill gaps first",
                self.timestamp(k)
            )));
        }
        Ok(&self.values)
    }

    /// Same start, resolution, and length as `other`.
    pub fn check_aligned(&self, other: &TimeSeries, what: &str) -> Result<()> {
        if self.start != other.start
            || self.resolution != other.resolution
            || self.values.len() != other.values.len()
        {
            return Err(Error::InvalidInput(format!(
                "{what}: series are not aligned \
                 ({} x{} @{} vs {} x{} @{})",
                self.start,
                self.values.len(),
                self.resolution,
                other.start,
                other.values.len(),
                other.resolution
            )));
        }
        Ok(())
    }

    /// A copy with the same timeline and unit but new values.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        Self::new(self.start, self.resolution, values, self.unit.clone())
    }

    /// The `len` values beginning at index `from`, as their own series.
    pub fn slice(&self, from: usize, len: usize) -> Result<Self> {
        if from + len > self.values.len() {
            return Err(Error::InvalidInput(format!(
                "slice [{from}, {}) out of range for {} values",
                from + len,
                self.values.len()
            )));
        }
        Self::new(
            self.timestamp(from),
            self.resolution,
            self.values[from..from + len].to_vec(),
            self.unit.clone(),
        )
    }

    /// A copy with a different unit label.
    pub fn with_unit(&self, unit: impl Into<String>) -> Self {
        Self {
            unit: unit.into(),
            ..self.clone()
        }
    }
}

/// Whether a unit label denotes an extensive (energy-like) quantity that is
/// summed when aggregating, as opposed to an intensive one that is averaged.
pub fn unit_is_extensive(unit: &str) -> bool {
    matches!(
        unit.to_ascii_lowercase().as_str(),
        "wh" | "kwh" | "mwh" | "gwh" | "j" | "kj" | "mj" | "gj"
    )
}

/// One metered supply point: an identifier, its consumption series, and
/// free-form tags (contract, sector, district, ...).
#[derive(Debug, Clone)]
pub struct MeterRecord {
    pub meter_id: String,
    pub series: TimeSeries,
    pub labels: BTreeMap<String, String>,
}

impl MeterRecord {
    pub fn new(meter_id: impl Into<String>, series: TimeSeries) -> Self {
        Self {
            meter_id: meter_id.into(),
            series,
            labels: BTreeMap::new(),
        }
    }
}

#[cfg(test)]
pub(crate) fn t0() -> DateTime<Utc> {
    chrono::TimeZone::with_ymd_and_hms(&Utc, 2022, 1, 1, 0, 0, 0).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn timeline_indexing() {
        let s = TimeSeries::new(t0(), Duration::minutes(30), vec![1.0, 2.0, 3.0], "kWh").unwrap();
        assert_eq!(s.timestamp(2), t0() + Duration::minutes(60));
        assert_eq!(s.resolution_hours(), 0.5);
    }

    #[test]
    fn zero_resolution_rejected() {
        assert!(TimeSeries::new(t0(), Duration::zero(), vec![], "kWh").is_err());
    }

    #[test]
    fn dense_reports_first_gap() {
        let s = TimeSeries::new(t0(), Duration::hours(1), vec![1.0, f64::NAN], "kWh").unwrap();
        assert!(s.dense().is_err());
    }

    #[test]
    fn unit_classes() {
        assert!(unit_is_extensive("kWh"));
        assert!(unit_is_extensive("MWh"));
        assert!(!unit_is_extensive("°C"));
        assert!(!unit_is_extensive("£/kWh"));
        assert!(!unit_is_extensive("kW"));
    }
}
