//! `ems`: three strategies across the four tariff structures, plus the
//! twin evaluation when a measured PV column is present.

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::{csv_bytes, fmt_f64, load_config, read_input, OutputSet, RunOptions, RunSummary};
use crate::ems::{
    baseline_dispatch, evaluate_twin, optimise_cost, optimise_self_consumption, simulate_pv,
    tariff_scenarios, BatterySpec, DispatchResult, PvSpec, StrategyKind, TwinContext,
};
use crate::milp::SolveOptions;
use crate::series::{ingest_csv, CsvSchema, MeterRecord, TimeSeries};
use crate::{Error, Result};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Config {
    #[serde(default, rename = "out_dir")]
    _out_dir: Option<PathBuf>,
    #[serde(default, rename = "seed")]
    _seed: Option<u64>,
    pv: PvSection,
    battery: BatterySection,
    site: SiteSection,
    tariffs: TariffSection,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PvSection {
    dc_rating: f64,
    system_efficiency: f64,
    #[serde(default)]
    derate_coeff: f64,
    #[serde(default = "default_ref_temp")]
    ref_temp: f64,
    #[serde(default = "default_irradiance_at_rating")]
    irradiance_at_rating: f64,
}

fn default_ref_temp() -> f64 {
    25.0
}

fn default_irradiance_at_rating() -> f64 {
    1000.0
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BatterySection {
    e_cap: f64,
    soc_min: f64,
    soc_max: f64,
    p_max: f64,
    eta_c: f64,
    eta_d: f64,
    #[serde(default)]
    cycle_limit: Option<f64>,
    initial_soc: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SiteSection {
    /// Columns: irradiance, ambient_temp, load, carbon_intensity, and
    /// optionally measured_pv.
    csv: PathBuf,
    #[serde(default)]
    peak_threshold: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TariffSection {
    base_price: f64,
    peak_multiplier: f64,
    export_price: f64,
    #[serde(default)]
    carbon_weight: f64,
}

#[derive(Serialize)]
struct StrategySummary {
    cost: f64,
    carbon: f64,
    cycles: f64,
    savings_vs_baseline_pct: Option<f64>,
}

fn summary(r: &DispatchResult, baseline_cost: Option<f64>) -> StrategySummary {
    let savings = baseline_cost.and_then(|b| {
        if b != 0.0 {
            Some((b - r.cost) / b.abs() * 100.0)
        } else {
            None
        }
    });
    StrategySummary {
        cost: r.cost,
        carbon: r.carbon,
        cycles: r.cycles,
        savings_vs_baseline_pct: savings,
    }
}

fn dispatch_csv(r: &DispatchResult) -> Result<Vec<u8>> {
    let rows: Vec<Vec<String>> = (0..r.charge.len())
        .map(|t| {
            vec![
                r.charge
                    .timestamp(t)
                    .to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
                fmt_f64(r.charge.value(t)),
                fmt_f64(r.discharge.value(t)),
                fmt_f64(r.import.value(t)),
                fmt_f64(r.export.value(t)),
                fmt_f64(r.soc.value(t)),
            ]
        })
        .collect();
    csv_bytes(
        &[
            "timestamp",
            "charge_kwh",
            "discharge_kwh",
            "import_kwh",
            "export_kwh",
            "soc_pct",
        ],
        rows,
    )
}

fn column<'a>(records: &'a [MeterRecord], name: &str, path: &str) -> Result<&'a TimeSeries> {
    records
        .iter()
        .find(|r| r.meter_id == name)
        .map(|r| &r.series)
        .ok_or_else(|| Error::InvalidInput(format!("{path}: missing column '{name}'")))
}

pub fn run(opts: &RunOptions) -> Result<RunSummary> {
    let loaded = load_config::<Config>(opts, "ems")?;
    let cfg = &loaded.config;
    let mut outputs = OutputSet::new("ems", loaded.seed, Some(loaded.config_sha256.clone()));

    let path = read_input(&mut outputs, &loaded.config_dir, &cfg.site.csv)?;
    let records = ingest_csv(
        &path,
        &CsvSchema {
            timestamp_column: "timestamp".into(),
            value_columns: None,
            unit: "".into(),
        },
    )?;
    let display = path.display().to_string();
    let irradiance = column(&records, "irradiance", &display)?.clone().with_unit("W/m²");
    let ambient = column(&records, "ambient_temp", &display)?.clone().with_unit("°C");
    let load = column(&records, "load", &display)?.clone().with_unit("kWh");
    let carbon = column(&records, "carbon_intensity", &display)?
        .clone()
        .with_unit("gCO2/kWh");
    let measured_pv = records
        .iter()
        .find(|r| r.meter_id == "measured_pv")
        .map(|r| r.series.clone().with_unit("kWh"));

    let pv_spec = PvSpec {
        dc_rating: cfg.pv.dc_rating,
        derate_coeff: cfg.pv.derate_coeff,
        ref_temp: cfg.pv.ref_temp,
        system_efficiency: cfg.pv.system_efficiency,
        irradiance_at_rating: cfg.pv.irradiance_at_rating,
    };
    let battery = BatterySpec {
        e_cap: cfg.battery.e_cap,
        soc_min: cfg.battery.soc_min,
        soc_max: cfg.battery.soc_max,
        p_max: cfg.battery.p_max,
        eta_c: cfg.battery.eta_c,
        eta_d: cfg.battery.eta_d,
        cycle_limit: cfg.battery.cycle_limit,
        initial_soc: cfg.battery.initial_soc,
    };
    let pv = simulate_pv(&irradiance, &ambient, &pv_spec)?;
    let tariffs = tariff_scenarios(
        cfg.tariffs.base_price,
        cfg.tariffs.peak_multiplier,
        cfg.tariffs.export_price,
        &carbon,
        cfg.tariffs.carbon_weight,
    )?;
    let solve = SolveOptions::default();

    let mut report: BTreeMap<String, BTreeMap<String, StrategySummary>> = BTreeMap::new();
    for (tariff_name, tariff) in &tariffs {
        if opts.verbose {
            eprintln!("dispatching under tariff {tariff_name}");
        }
        let base = baseline_dispatch(&pv, &load, &battery, tariff)?;
        let selfc = optimise_self_consumption(
            &pv,
            &load,
            &battery,
            tariff,
            cfg.site.peak_threshold,
            &solve,
        )?;
        let costb =
            optimise_cost(&pv, &load, &battery, tariff, cfg.site.peak_threshold, &solve)?;

        let mut per_strategy = BTreeMap::new();
        per_strategy.insert("baseline".to_string(), summary(&base, None));
        per_strategy.insert(
            "self-consumption".to_string(),
            summary(&selfc, Some(base.cost)),
        );
        per_strategy.insert("cost-based".to_string(), summary(&costb, Some(base.cost)));
        for (strategy, result) in [
            ("baseline", &base),
            ("self-consumption", &selfc),
            ("cost-based", &costb),
        ] {
            outputs.add(
                format!("dispatch_{tariff_name}_{strategy}.csv"),
                dispatch_csv(result)?,
            );
        }
        report.insert(tariff_name.clone(), per_strategy);
    }
    outputs.add_json("ems_summary.json", &report)?;

    if let Some(measured) = measured_pv {
        let twin = evaluate_twin(
            &pv,
            &measured,
            &TwinContext {
                load: load.clone(),
                battery: battery.clone(),
                tariff: tariffs[0].1.clone(),
                strategy: StrategyKind::Baseline,
                solve,
            },
        )?;
        outputs.add_json("twin_report.json", &twin)?;
    }
    outputs.write(&loaded.out_dir)
}
