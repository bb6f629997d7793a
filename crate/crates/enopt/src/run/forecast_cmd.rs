//! `forecast`: per-meter backtest, final ensemble forecast, hierarchy
//! aggregation.

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::{csv_bytes, fmt_f64, load_config, read_input, OutputSet, RunOptions, RunSummary};
use crate::forecast::{
    aggregate_bottom_up, backtest, ensemble_forecast, BacktestConfig, EmaModel, Exogenous,
    ForecastModel, Hierarchy, Level, LinearArModel, SeasonalNaiveModel,
};
use crate::series::{ingest_csv, AccuracyReport, CsvSchema, TimeSeries};
use crate::{Error, Result};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Config {
    #[serde(default, rename = "out_dir")]
    _out_dir: Option<PathBuf>,
    #[serde(default, rename = "seed")]
    _seed: Option<u64>,
    forecast: ForecastSection,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ForecastSection {
    meters_csv: PathBuf,
    #[serde(default)]
    weather_csv: Option<PathBuf>,
    window: usize,
    horizon: usize,
    #[serde(default = "default_epsilon")]
    epsilon: f64,
    models: ModelsSection,
    hierarchy: HierarchySection,
    /// Aggregation levels to emit: meter, contract, sector, district,
    /// portfolio.
    levels: Vec<String>,
}

fn default_epsilon() -> f64 {
    1e-6
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelsSection {
    ema_alpha: f64,
    seasonal_length: usize,
    /// 0 disables the autoregressive model.
    ar_lags: usize,
    #[serde(default)]
    use_weather_in_ar: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct HierarchySection {
    meters: BTreeMap<String, String>,
    contracts: BTreeMap<String, String>,
    sectors: BTreeMap<String, String>,
    districts: BTreeMap<String, String>,
}

#[derive(Serialize)]
struct MeterReport {
    ensemble: AccuracyReport,
    per_model: BTreeMap<String, AccuracyReport>,
    final_weights: BTreeMap<String, f64>,
    weight_trajectory: Vec<(usize, Vec<f64>)>,
}

fn parse_level(name: &str) -> Result<Level> {
    Ok(match name {
        "meter" => Level::Meter,
        "contract" => Level::Contract,
        "sector" => Level::Sector,
        "district" => Level::District,
        "portfolio" => Level::Portfolio,
        other => {
            return Err(Error::InvalidInput(format!(
                "unknown hierarchy level '{other}'"
            )))
        }
    })
}

fn model_pool(models: &ModelsSection, with_weather: bool) -> Result<Vec<Box<dyn ForecastModel>>> {
    let mut pool: Vec<Box<dyn ForecastModel>> = vec![
        Box::new(EmaModel::new(models.ema_alpha)),
        Box::new(SeasonalNaiveModel::new(models.seasonal_length)),
    ];
    if models.ar_lags > 0 {
        if models.use_weather_in_ar && !with_weather {
            return Err(Error::InvalidInput(
                "use_weather_in_ar is set but no weather_csv was given".into(),
            ));
        }
        pool.push(Box::new(LinearArModel::new(models.ar_lags)));
    }
    Ok(pool)
}

pub fn run(opts: &RunOptions) -> Result<RunSummary> {
    let loaded = load_config::<Config>(opts, "forecast")?;
    let cfg = &loaded.config.forecast;
    let mut outputs = OutputSet::new("forecast", loaded.seed, Some(loaded.config_sha256.clone()));

    let meters_path = read_input(&mut outputs, &loaded.config_dir, &cfg.meters_csv)?;
    let records = ingest_csv(&meters_path, &CsvSchema::half_hourly_kwh("timestamp"))?;
    if records.is_empty() {
        return Err(Error::InvalidInput("no meters in the input file".into()));
    }
    let levels: Vec<(String, Level)> = cfg
        .levels
        .iter()
        .map(|name| parse_level(name).map(|l| (name.clone(), l)))
        .collect::<Result<_>>()?;

    let exogenous = match &cfg.weather_csv {
        None => None,
        Some(rel) => {
            let path = read_input(&mut outputs, &loaded.config_dir, rel)?;
            let weather = ingest_csv(&path, &CsvSchema {
                timestamp_column: "timestamp".into(),
                value_columns: None,
                unit: "".into(),
            })?;
            let mut exog = Exogenous::new();
            for rec in weather {
                exog = exog.push(rec.meter_id.clone(), rec.series.values().to_vec());
            }
            Some(exog)
        }
    };
    let use_exog = cfg.models.use_weather_in_ar;

    let hierarchy = Hierarchy {
        meter_to_contract: cfg.hierarchy.meters.clone(),
        contract_to_sector: cfg.hierarchy.contracts.clone(),
        sector_to_district: cfg.hierarchy.sectors.clone(),
        district_to_portfolio: cfg.hierarchy.districts.clone(),
    };
    hierarchy.validate()?;

    let bt_cfg = BacktestConfig {
        window: cfg.window,
        horizon: cfg.horizon,
        epsilon: cfg.epsilon,
    };

    let mut reports: BTreeMap<String, MeterReport> = BTreeMap::new();
    let mut final_forecasts: BTreeMap<String, TimeSeries> = BTreeMap::new();
    for record in &records {
        if opts.verbose {
            eprintln!("backtesting meter {}", record.meter_id);
        }
        let exog_ref = if use_exog { exogenous.as_ref() } else { None };
        let mut pool = model_pool(&cfg.models, exogenous.is_some())?;
        let result = backtest(&mut pool, &record.series, exog_ref, &bt_cfg)?;

        // Final forecast: refit on the full history and blend with the
        // weights of the last fold (the freshest causal weights).
        let weights = crate::forecast::EnsembleWeights::from_weights(
            result
                .weight_trajectory
                .last()
                .map(|(_, w)| w.clone())
                .ok_or_else(|| Error::InvalidInput("backtest produced no folds".into()))?,
        )?;
        let mut members = Vec::with_capacity(pool.len());
        for model in pool.iter_mut() {
            model.fit(&record.series, exog_ref)?;
            members.push(model.predict(cfg.horizon)?);
        }
        let blended = ensemble_forecast(&members, &weights)?;
        final_forecasts.insert(record.meter_id.clone(), blended);

        let names: Vec<String> = pool.iter().map(|m| m.name().to_string()).collect();
        reports.insert(
            record.meter_id.clone(),
            MeterReport {
                ensemble: result.accuracy,
                per_model: names
                    .iter()
                    .cloned()
                    .zip(result.per_model_accuracy)
                    .collect(),
                final_weights: names
                    .iter()
                    .cloned()
                    .zip(weights.as_slice().iter().copied())
                    .collect(),
                weight_trajectory: result.weight_trajectory,
            },
        );
    }

    outputs.add_json("backtest_report.json", &reports)?;
    for (name, level) in levels {
        let aggregated = aggregate_bottom_up(&final_forecasts, &hierarchy, level)?;
        let mut header = vec!["timestamp"];
        let node_names: Vec<&String> = aggregated.keys().collect();
        header.extend(node_names.iter().map(|s| s.as_str()));
        let first = aggregated.values().next().unwrap();
        let rows: Vec<Vec<String>> = (0..first.len())
            .map(|k| {
                let mut row = vec![first
                    .timestamp(k)
                    .to_rfc3339_opts(chrono::SecondsFormat::Secs, true)];
                row.extend(aggregated.values().map(|s| fmt_f64(s.value(k))));
                row
            })
            .collect();
        outputs.add(format!("forecast_{name}.csv"), csv_bytes(&header, rows)?);
    }
    outputs.write(&loaded.out_dir)
}
