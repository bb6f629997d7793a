//! Meter data pipeline: CSV ingestion, gap filling, anomaly flagging,
//! completeness filtering, resampling, and accuracy scoring.
//!
//! Run with: cargo run --release --example meter_pipeline

use chrono::Duration;
use enopt::series::{
    detect_anomalies, fill_gaps, filter_meters, ingest_csv, resample, score, CsvSchema,
};
use enopt::synth;

fn main() {
    // Write a small meter file to a temp dir, then ingest it back — the
    // same path the CLI takes.
    let dir = std::env::temp_dir().join("enopt_meter_pipeline");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("meters.csv");
    let (records, _) = synth::meter_fleet(42, 1).unwrap();
    let columns: Vec<(&str, &enopt::series::TimeSeries)> = records
        .iter()
        .take(2)
        .map(|r| (r.meter_id.as_str(), &r.series))
        .collect();
    enopt::series::write_series_csv(&path, &columns).unwrap();

    let ingested = ingest_csv(&path, &CsvSchema::half_hourly_kwh("timestamp")).unwrap();
    println!(
        "ingested {} meters x {} half-hourly steps",
        ingested.len(),
        ingested[0].series.len()
    );

    // Knock some holes and a spike into the first meter.
    let mut values = ingested[0].series.values().to_vec();
    values[100] = f64::NAN;
    values[200] = f64::NAN;
    values[201] = f64::NAN;
    values[250] *= 40.0;
    let dirty = ingested[0].series.with_values(values).unwrap();

    let flagged = detect_anomalies(&dirty, 6.0).unwrap();
    println!("anomaly indices at z > 6: {flagged:?}");

    let (filled, report) = fill_gaps(&dirty, 2).unwrap();
    println!(
        "gap filling: {} missing before, {} after, unfilled runs {:?}",
        dirty.missing_count(),
        filled.missing_count(),
        report.remaining
    );

    // Completeness partition over the first day.
    let window = (dirty.start(), dirty.start() + Duration::hours(24));
    let (kept, rejected) = filter_meters(&ingested, 0.8, window).unwrap();
    println!(
        "completeness filter: kept {}, rejected {}",
        kept.len(),
        rejected.len()
    );

    // Hourly view of the cleaned series; energy is conserved.
    let hourly = resample(&filled, Duration::hours(1)).unwrap();
    let total_before: f64 = filled.values().iter().filter(|v| !v.is_nan()).sum();
    let total_after: f64 = hourly.values().iter().filter(|v| !v.is_nan()).sum();
    println!(
        "resample 30 min -> 1 h: {} -> {} steps, total {:.3} -> {:.3} kWh",
        filled.len(),
        hourly.len(),
        total_before,
        total_after
    );

    // Score a deliberately biased "prediction" of the second meter.
    let actual = &ingested[1].series;
    let predicted = actual
        .with_values(actual.values().iter().map(|v| v * 1.05 + 0.1).collect())
        .unwrap();
    let report = score(actual, &predicted).unwrap();
    println!(
        "scoring a 5% biased prediction: mae {:.3}, mape {:.2}%, rmse {:.3}, smape {:.2}%, r2 {:.3}",
        report.mae,
        report.mape.unwrap() * 100.0,
        report.rmse,
        report.smape * 100.0,
        report.r2.unwrap()
    );
}
