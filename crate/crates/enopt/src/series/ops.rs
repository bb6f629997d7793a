//! Resampling, gap filling, anomaly flagging, and meter filtering.

use chrono::{DateTime, Duration, Utc};

use super::{unit_is_extensive, MeterRecord, TimeSeries};
use crate::{Error, Result};

/// Window width for the rolling median/MAD anomaly statistic. Roughly one
/// day of half-hourly data; odd so the median sits on a sample.
pub const ANOMALY_WINDOW: usize = 49;

/// Consistency factor turning a MAD into a normal-comparable sigma.
const MAD_SCALE: f64 = 1.4826;

/// Changes the resolution of a series. Extensive (energy-like) units are
/// summed when coarsening and split evenly when refining; intensive units
/// are averaged and held. The target must be an integer multiple or divisor
/// of the source resolution.
pub fn resample(s: &TimeSeries, target: Duration) -> Result<TimeSeries> {
    if target <= Duration::zero() {
        return Err(Error::InvalidInput(
            "target resolution must be positive".into(),
        ));
    }
    let src_ms = s.resolution().num_milliseconds();
    let dst_ms = target.num_milliseconds();
    let extensive = unit_is_extensive(s.unit());

    if dst_ms == src_ms {
        return Ok(s.clone());
    }
    if dst_ms > src_ms && dst_ms % src_ms == 0 {
        // Coarsen: groups of k source steps.
        let k = (dst_ms / src_ms) as usize;
        if s.len() % k != 0 {
            return Err(Error::InvalidInput(format!(
                "cannot coarsen: {} values do not divide into groups of {k}",
                s.len()
            )));
        }
        let values: Vec<f64> = s
            .values()
            .chunks(k)
            .map(|chunk| {
                if chunk.iter().any(|v| v.is_nan()) {
                    f64::NAN
                } else if extensive {
                    chunk.iter().sum()
                } else {
                    chunk.iter().sum::<f64>() / k as f64
                }
            })
            .collect();
        TimeSeries::new(s.start(), target, values, s.unit())
    } else if src_ms > dst_ms && src_ms % dst_ms == 0 {
        // Refine: k target steps per source step.
        let k = (src_ms / dst_ms) as usize;
        let mut values = Vec::with_capacity(s.len() * k);
        for &v in s.values() {
            let out = if extensive { v / k as f64 } else { v };
            values.extend(std::iter::repeat(out).take(k));
        }
        TimeSeries::new(s.start(), target, values, s.unit())
    } else {
        Err(Error::InvalidInput(format!(
            "resolutions are not commensurate: {src_ms} ms vs {dst_ms} ms"
        )))
    }
}

/// Gaps left unfilled by [`fill_gaps`], as `(start_index, length)` runs.
#[derive(Debug, Clone, Default)]
pub struct GapReport {
    pub remaining: Vec<(usize, usize)>,
}

impl GapReport {
    pub fn is_clean(&self) -> bool {
        self.remaining.is_empty()
    }
}

/// Linearly interpolates interior missing runs of length `<= max_gap`.
/// Longer runs, and leading/trailing runs with no bracketing value, are left
/// missing and reported.
pub fn fill_gaps(s: &TimeSeries, max_gap: usize) -> Result<(TimeSeries, GapReport)> {
    let n = s.len();
    if n == 0 || s.missing_count() == n {
        return Err(Error::InvalidInput("series is entirely missing".into()));
    }
    let mut values = s.values().to_vec();
    let mut report = GapReport::default();

    let mut i = 0;
    while i < n {
        if !values[i].is_nan() {
            i += 1;
            continue;
        }
        let run_start = i;
        while i < n && values[i].is_nan() {
            i += 1;
        }
        let run_len = i - run_start;
        let left = run_start.checked_sub(1).map(|j| values[j]);
        let right = if i < n { Some(values[i]) } else { None };
        match (left, right) {
            (Some(a), Some(b)) if run_len <= max_gap => {
                let span = (run_len + 1) as f64;
                for (step, v) in values[run_start..run_start + run_len].iter_mut().enumerate() {
                    let w = (step + 1) as f64 / span;
                    *v = a + (b - a) * w;
                }
            }
            _ => report.remaining.push((run_start, run_len)),
        }
    }
    Ok((s.with_values(values)?, report))
}

/// Flags indices whose robust z-score against a rolling median/MAD exceeds
/// `z_threshold`. Needs at least ten observed values. Missing entries are
/// neither flagged nor used in the window statistics.
pub fn detect_anomalies(s: &TimeSeries, z_threshold: f64) -> Result<Vec<usize>> {
    detect_anomalies_with_window(s, z_threshold, ANOMALY_WINDOW)
}

pub fn detect_anomalies_with_window(
    s: &TimeSeries,
    z_threshold: f64,
    window: usize,
) -> Result<Vec<usize>> {
    let n = s.len();
    let observed = n - s.missing_count();
    if observed < 10 {
        return Err(Error::InvalidInput(format!(
            "anomaly detection needs at least 10 observed values, got {observed}"
        )));
    }
    if window < 3 {
        return Err(Error::InvalidInput("window must be at least 3".into()));
    }
    let half = window / 2;
    let mut flagged = Vec::new();
    let mut buf = Vec::with_capacity(window);
    for i in 0..n {
        let v = s.value(i);
        if v.is_nan() {
            continue;
        }
        let lo = i.saturating_sub(half);
        let hi = (i + half + 1).min(n);
        buf.clear();
        buf.extend(s.values()[lo..hi].iter().copied().filter(|x| !x.is_nan()));
        if buf.len() < 3 {
            continue;
        }
        let med = median_in_place(&mut buf);
        let dev = (v - med).abs();
        for x in buf.iter_mut() {
            *x = (*x - med).abs();
        }
        let sigma = MAD_SCALE * median_in_place(&mut buf);
        let anomalous = if sigma > 0.0 {
            dev / sigma > z_threshold
        } else {
            // Flat window: any deviation at all is infinitely many sigmas out.
            dev > 0.0 && z_threshold.is_finite()
        };
        if anomalous {
            flagged.push(i);
        }
    }
    Ok(flagged)
}

fn median_in_place(buf: &mut [f64]) -> f64 {
    buf.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = buf.len();
    if n % 2 == 1 {
        buf[n / 2]
    } else {
        0.5 * (buf[n / 2 - 1] + buf[n / 2])
    }
}

/// Partitions meters into (kept, rejected) by completeness over a window:
/// kept iff the observed fraction of steps in `[window.0, window.1)` is at
/// least `min_completeness` (boundary counts as kept).
pub fn filter_meters(
    records: &[MeterRecord],
    min_completeness: f64,
    window: (DateTime<Utc>, DateTime<Utc>),
) -> Result<(Vec<MeterRecord>, Vec<MeterRecord>)> {
    if records.is_empty() {
        return Err(Error::InvalidInput("no meters to filter".into()));
    }
    if !(0.0..=1.0).contains(&min_completeness) {
        return Err(Error::InvalidInput(
            "min_completeness must be within [0, 1]".into(),
        ));
    }
    let (w_start, w_end) = window;
    if w_end <= w_start {
        return Err(Error::InvalidInput("window is empty".into()));
    }
    let mut kept = Vec::new();
    let mut rejected = Vec::new();
    for r in records {
        let s = &r.series;
        let res_ms = s.resolution().num_milliseconds();
        let end = s.timestamp(s.len().saturating_sub(1)) + s.resolution();
        if w_start < s.start() || w_end > end {
            return Err(Error::InvalidInput(format!(
                "window [{w_start}, {w_end}) outside data range of meter '{}'",
                r.meter_id
            )));
        }
        let first = ((w_start - s.start()).num_milliseconds() / res_ms) as usize;
        let last = ((w_end - s.start()).num_milliseconds() / res_ms) as usize;
        let total = last - first;
        let present = (first..last).filter(|&k| !s.is_missing(k)).count();
        if present as f64 / total as f64 >= min_completeness {
            kept.push(r.clone());
        } else {
            rejected.push(r.clone());
        }
    }
    Ok((kept, rejected))
}
