//! `chp`: optimised dispatch, rules-based baseline, and the savings report.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::{csv_bytes, fmt_f64, load_config, read_input, OutputSet, RunOptions, RunSummary};
use crate::chp::{
    baseline_schedule, compare, optimise, ArtificialCosts, BaselineRule, BoilerSpec, ChpSpec,
    CostBreakdown, NetworkScenario, NetworkSchedule, SiteAssets, ThermalStoreSpec,
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
    chp: ChpSection,
    boiler: BoilerSection,
    #[serde(default)]
    store: Option<StoreSection>,
    scenario: ScenarioSection,
    #[serde(default)]
    artificial: ArtificialSection,
    baseline: BaselineSection,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChpSection {
    elec_capacity: f64,
    heat_capacity: f64,
    gas_per_elec: f64,
    min_load_fraction: f64,
    maintenance_cost_per_hour: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BoilerSection {
    heat_capacity: f64,
    efficiency: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct StoreSection {
    capacity: f64,
    min_level: f64,
    max_charge_rate: f64,
    max_discharge_rate: f64,
    initial_soe: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioSection {
    csv: PathBuf,
    max_daily_restarts: u32,
    #[serde(default)]
    chp_initially_on: bool,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ArtificialSection {
    #[serde(default)]
    import_pref: f64,
    #[serde(default)]
    chp_pref: f64,
    #[serde(default)]
    boiler_pref: f64,
    #[serde(default)]
    restart: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BaselineSection {
    start_hour: u32,
    end_hour: u32,
    load_fraction: f64,
}

#[derive(Serialize)]
struct CostsOut {
    optimised: CostBreakdown,
    baseline: CostBreakdown,
}

fn column<'a>(records: &'a [MeterRecord], name: &str, path: &str) -> Result<&'a TimeSeries> {
    records
        .iter()
        .find(|r| r.meter_id == name)
        .map(|r| &r.series)
        .ok_or_else(|| Error::InvalidInput(format!("{path}: missing column '{name}'")))
}

fn schedule_csv(schedule: &NetworkSchedule, scenario: &NetworkScenario) -> Result<Vec<u8>> {
    let rows: Vec<Vec<String>> = schedule
        .steps
        .iter()
        .enumerate()
        .map(|(t, s)| {
            vec![
                scenario
                    .elec_demand
                    .timestamp(t)
                    .to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
                (s.chp_on as u8).to_string(),
                fmt_f64(s.chp_load),
                (s.restart as u8).to_string(),
                fmt_f64(s.e_chp),
                fmt_f64(s.e_import),
                fmt_f64(s.e_export),
                fmt_f64(s.q_chp),
                fmt_f64(s.q_boiler),
                fmt_f64(s.q_charge),
                fmt_f64(s.q_discharge),
                fmt_f64(s.soe),
            ]
        })
        .collect();
    csv_bytes(
        &[
            "timestamp",
            "chp_on",
            "chp_load",
            "restart",
            "e_chp",
            "e_import",
            "e_export",
            "q_chp",
            "q_boiler",
            "q_charge",
            "q_discharge",
            "soe",
        ],
        rows,
    )
}

pub fn run(opts: &RunOptions) -> Result<RunSummary> {
    let loaded = load_config::<Config>(opts, "chp")?;
    let cfg = &loaded.config;
    let mut outputs = OutputSet::new("chp", loaded.seed, Some(loaded.config_sha256.clone()));

    let path = read_input(&mut outputs, &loaded.config_dir, &cfg.scenario.csv)?;
    let records = ingest_csv(
        &path,
        &CsvSchema {
            timestamp_column: "timestamp".into(),
            value_columns: None,
            unit: "".into(),
        },
    )?;
    let display = path.display().to_string();
    let scenario = NetworkScenario {
        elec_demand: column(&records, "elec_demand", &display)?.clone().with_unit("kW"),
        heat_demand: column(&records, "heat_demand", &display)?.clone().with_unit("kW"),
        gas_price: column(&records, "gas_price", &display)?
            .clone()
            .with_unit("£/kWh"),
        import_price: column(&records, "import_price", &display)?
            .clone()
            .with_unit("£/kWh"),
        export_price: column(&records, "export_price", &display)?
            .clone()
            .with_unit("£/kWh"),
        max_daily_restarts: cfg.scenario.max_daily_restarts,
        chp_initially_on: cfg.scenario.chp_initially_on,
        artificial: ArtificialCosts {
            import_pref: cfg.artificial.import_pref,
            chp_pref: cfg.artificial.chp_pref,
            boiler_pref: cfg.artificial.boiler_pref,
            restart: cfg.artificial.restart,
        },
    };
    let assets = SiteAssets {
        chp: ChpSpec {
            elec_capacity: cfg.chp.elec_capacity,
            heat_capacity: cfg.chp.heat_capacity,
            gas_per_elec: cfg.chp.gas_per_elec,
            min_load_fraction: cfg.chp.min_load_fraction,
            maintenance_cost_per_hour: cfg.chp.maintenance_cost_per_hour,
        },
        boiler: BoilerSpec {
            heat_capacity: cfg.boiler.heat_capacity,
            efficiency: cfg.boiler.efficiency,
        },
        store: cfg.store.as_ref().map(|s| ThermalStoreSpec {
            capacity: s.capacity,
            min_level: s.min_level,
            max_charge_rate: s.max_charge_rate,
            max_discharge_rate: s.max_discharge_rate,
            initial_soe: s.initial_soe,
        }),
    };
    let rule = BaselineRule {
        start_hour: cfg.baseline.start_hour,
        end_hour: cfg.baseline.end_hour,
        load_fraction: cfg.baseline.load_fraction,
    };

    if opts.verbose {
        eprintln!("optimising {} steps", scenario.len());
    }
    let optimised = optimise(&scenario, &assets, &SolveOptions::default())?;
    let baseline = baseline_schedule(&scenario, &assets, &rule)?;
    let savings = compare(&baseline, &optimised, None);

    outputs.add(
        "optimised_schedule.csv".to_string(),
        schedule_csv(&optimised, &scenario)?,
    );
    outputs.add(
        "baseline_schedule.csv".to_string(),
        schedule_csv(&baseline, &scenario)?,
    );
    outputs.add_json(
        "costs.json",
        &CostsOut {
            optimised: optimised.breakdown.clone(),
            baseline: baseline.breakdown.clone(),
        },
    )?;
    outputs.add_json("savings.json", &savings)?;
    outputs.write(&loaded.out_dir)
}
