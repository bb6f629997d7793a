//! `fit-building`, `mpc`, and `pareto`.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::{csv_bytes, fmt_f64, load_config, read_input, OutputSet, RunOptions, RunSummary};
use crate::building::{
    fit_parameters, pareto_sweep, rolling_mpc, simulate, thermostat_policy, BuildingSchedule,
    ComfortSpec, FitHistory, HvacSpec, MpcConfig, ObjectiveWeights, RcModelParams,
    ScenarioInputs,
};
use crate::milp::SolveOptions;
use crate::series::{ingest_csv, CsvSchema, MeterRecord, TimeSeries};
use crate::{Error, Result};

fn column<'a>(records: &'a [MeterRecord], name: &str, path: &str) -> Result<&'a TimeSeries> {
    records
        .iter()
        .find(|r| r.meter_id == name)
        .map(|r| &r.series)
        .ok_or_else(|| Error::InvalidInput(format!("{path}: missing column '{name}'")))
}

fn read_table(
    outputs: &mut OutputSet,
    config_dir: &std::path::Path,
    rel: &std::path::Path,
) -> Result<(Vec<MeterRecord>, String)> {
    let path = read_input(outputs, config_dir, rel)?;
    let records = ingest_csv(
        &path,
        &CsvSchema {
            timestamp_column: "timestamp".into(),
            value_columns: None,
            unit: "".into(),
        },
    )?;
    Ok((records, path.display().to_string()))
}

// ---------------------------------------------------------------- fit

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FitConfig {
    #[serde(default, rename = "out_dir")]
    _out_dir: Option<PathBuf>,
    #[serde(default, rename = "seed")]
    _seed: Option<u64>,
    fit_building: FitSection,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FitSection {
    history_csv: PathBuf,
}

#[derive(Serialize)]
struct FittedParams {
    resistance: f64,
    capacitance: f64,
    solar_gain: f64,
}

pub fn run_fit(opts: &RunOptions) -> Result<RunSummary> {
    let loaded = load_config::<FitConfig>(opts, "fit-building")?;
    let mut outputs = OutputSet::new(
        "fit-building",
        loaded.seed,
        Some(loaded.config_sha256.clone()),
    );
    let (records, path) = read_table(
        &mut outputs,
        &loaded.config_dir,
        &loaded.config.fit_building.history_csv,
    )?;
    let history = FitHistory {
        indoor_temp: column(&records, "indoor_temp", &path)?.clone().with_unit("°C"),
        outdoor_temp: column(&records, "outdoor_temp", &path)?.clone().with_unit("°C"),
        irradiance: column(&records, "irradiance", &path)?.clone().with_unit("W/m²"),
        q_hvac: column(&records, "q_hvac", &path)?.clone().with_unit("kW"),
    };
    let (params, accuracy) = fit_parameters(&history)?;
    outputs.add_json(
        "fitted_params.json",
        &FittedParams {
            resistance: params.resistance,
            capacitance: params.capacitance,
            solar_gain: params.solar_gain,
        },
    )?;
    outputs.add_json("fit_accuracy.json", &accuracy)?;
    outputs.write(&loaded.out_dir)
}

// ---------------------------------------------------------------- shared

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct BuildingSection {
    resistance: f64,
    capacitance: f64,
    solar_gain: f64,
    /// Plant parameters when they differ from the controller's model.
    #[serde(default)]
    plant: Option<PlantSection>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct PlantSection {
    resistance: f64,
    capacitance: f64,
    solar_gain: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct HvacSection {
    q_max: f64,
    cop_heat: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct ComfortSection {
    target_occupied: f64,
    target_setback: f64,
    #[serde(default = "default_band")]
    band: f64,
    /// Occupied window, [start_hour, end_hour).
    occupied_hours: (u32, u32),
    #[serde(default = "default_true")]
    weekdays_only: bool,
}

fn default_band() -> f64 {
    1.0
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct WeightsSection {
    cost: f64,
    carbon: f64,
    comfort: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct InputsSection {
    scenario_csv: PathBuf,
    initial_temp: f64,
}

struct Scenario {
    inputs: ScenarioInputs,
    comfort: ComfortSpec,
    hvac: HvacSpec,
    initial_temp: f64,
}

fn load_scenario(
    outputs: &mut OutputSet,
    config_dir: &std::path::Path,
    inputs_cfg: &InputsSection,
    hvac_cfg: &HvacSection,
    comfort_cfg: &ComfortSection,
) -> Result<Scenario> {
    let (records, path) = read_table(outputs, config_dir, &inputs_cfg.scenario_csv)?;
    let inputs = ScenarioInputs {
        outdoor_temp: column(&records, "outdoor_temp", &path)?.clone().with_unit("°C"),
        irradiance: column(&records, "irradiance", &path)?.clone().with_unit("W/m²"),
        energy_price: column(&records, "energy_price", &path)?
            .clone()
            .with_unit("£/kWh"),
        carbon_intensity: column(&records, "carbon_intensity", &path)?
            .clone()
            .with_unit("gCO2/kWh"),
    };
    inputs.validate()?;
    let n = inputs.len();
    let (start_h, end_h) = comfort_cfg.occupied_hours;
    let mut target = Vec::with_capacity(n);
    let mut occupied = Vec::with_capacity(n);
    for k in 0..n {
        let ts = inputs.outdoor_temp.timestamp(k);
        use chrono::{Datelike, Timelike, Weekday};
        let weekend = matches!(ts.weekday(), Weekday::Sat | Weekday::Sun);
        let occ = (start_h..end_h).contains(&ts.hour())
            && !(comfort_cfg.weekdays_only && weekend);
        occupied.push(occ);
        target.push(if occ {
            comfort_cfg.target_occupied
        } else {
            comfort_cfg.target_setback
        });
    }
    let comfort = ComfortSpec::new(
        inputs.outdoor_temp.with_values(target)?.with_unit("°C"),
        occupied,
    )
    .with_band(comfort_cfg.band);
    Ok(Scenario {
        comfort,
        hvac: HvacSpec::heating_only(hvac_cfg.q_max, hvac_cfg.cop_heat),
        initial_temp: inputs_cfg.initial_temp,
        inputs,
    })
}

#[derive(Serialize)]
struct ScheduleSummary {
    cost: f64,
    carbon: f64,
    energy: f64,
    comfort_criterion: f64,
}

impl From<&BuildingSchedule> for ScheduleSummary {
    fn from(s: &BuildingSchedule) -> Self {
        Self {
            cost: s.cost,
            carbon: s.carbon,
            energy: s.energy,
            comfort_criterion: s.comfort_criterion,
        }
    }
}

fn schedule_csv(schedule: &BuildingSchedule) -> Result<Vec<u8>> {
    let rows: Vec<Vec<String>> = (0..schedule.heating.len())
        .map(|k| {
            vec![
                schedule
                    .heating
                    .timestamp(k)
                    .to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
                fmt_f64(schedule.heating.value(k)),
                fmt_f64(schedule.cooling.value(k)),
                fmt_f64(schedule.indoor_temp.value(k)),
            ]
        })
        .collect();
    csv_bytes(&["timestamp", "heating_kw", "cooling_kw", "indoor_temp"], rows)
}

// ---------------------------------------------------------------- mpc

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MpcFileConfig {
    #[serde(default, rename = "out_dir")]
    _out_dir: Option<PathBuf>,
    #[serde(default, rename = "seed")]
    _seed: Option<u64>,
    building: BuildingSection,
    hvac: HvacSection,
    comfort: ComfortSection,
    weights: WeightsSection,
    mpc: MpcSection,
    inputs: InputsSection,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MpcSection {
    horizon: usize,
    #[serde(default)]
    feedback_noise_std: f64,
    #[serde(default = "default_process_var")]
    process_var: f64,
    /// Thermostat warm-up lead, steps.
    #[serde(default = "default_warmup")]
    baseline_warmup_steps: usize,
    #[serde(default = "default_deadband")]
    baseline_deadband: f64,
}

fn default_process_var() -> f64 {
    0.01
}

fn default_warmup() -> usize {
    4
}

fn default_deadband() -> f64 {
    0.5
}

#[derive(Serialize)]
struct MpcReport {
    mpc: ScheduleSummary,
    thermostat_baseline: ScheduleSummary,
    cost_saving_pct: f64,
}

pub fn run_mpc(opts: &RunOptions) -> Result<RunSummary> {
    let loaded = load_config::<MpcFileConfig>(opts, "mpc")?;
    let cfg = &loaded.config;
    let mut outputs = OutputSet::new("mpc", loaded.seed, Some(loaded.config_sha256.clone()));
    let scenario = load_scenario(
        &mut outputs,
        &loaded.config_dir,
        &cfg.inputs,
        &cfg.hvac,
        &cfg.comfort,
    )?;
    let controller = RcModelParams::new(
        cfg.building.resistance,
        cfg.building.capacitance,
        cfg.building.solar_gain,
    );
    let plant = cfg
        .building
        .plant
        .as_ref()
        .map(|p| RcModelParams::new(p.resistance, p.capacitance, p.solar_gain))
        .unwrap_or(controller);
    let weights = ObjectiveWeights::new(cfg.weights.cost, cfg.weights.carbon, cfg.weights.comfort);

    let mpc_cfg = MpcConfig {
        horizon: cfg.mpc.horizon,
        feedback_noise_std: cfg.mpc.feedback_noise_std,
        process_var: cfg.mpc.process_var,
        seed: loaded.seed,
        solve: SolveOptions::default(),
    };
    let closed_loop = rolling_mpc(
        &plant,
        &controller,
        &scenario.hvac,
        &scenario.comfort,
        &weights,
        &scenario.inputs,
        scenario.initial_temp,
        &mpc_cfg,
    )?;
    let baseline = simulate(
        &plant,
        thermostat_policy(
            &scenario.comfort,
            &scenario.hvac,
            cfg.mpc.baseline_warmup_steps,
            cfg.mpc.baseline_deadband,
        ),
        &scenario.hvac,
        &scenario.comfort,
        &scenario.inputs,
        scenario.initial_temp,
    )?;
    let saving = if baseline.cost > 0.0 {
        (baseline.cost - closed_loop.cost) / baseline.cost * 100.0
    } else {
        0.0
    };

    outputs.add("mpc_schedule.csv".to_string(), schedule_csv(&closed_loop)?);
    outputs.add(
        "thermostat_schedule.csv".to_string(),
        schedule_csv(&baseline)?,
    );
    outputs.add_json(
        "mpc_summary.json",
        &MpcReport {
            mpc: (&closed_loop).into(),
            thermostat_baseline: (&baseline).into(),
            cost_saving_pct: saving,
        },
    )?;
    outputs.write(&loaded.out_dir)
}

// ---------------------------------------------------------------- pareto

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParetoFileConfig {
    #[serde(default, rename = "out_dir")]
    _out_dir: Option<PathBuf>,
    #[serde(default, rename = "seed")]
    _seed: Option<u64>,
    building: BuildingSection,
    hvac: HvacSection,
    comfort: ComfortSection,
    pareto: ParetoSection,
    inputs: InputsSection,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParetoSection {
    cost_weights: Vec<f64>,
    carbon_weights: Vec<f64>,
    comfort_weights: Vec<f64>,
}

#[derive(Serialize)]
struct ParetoPointOut {
    w_cost: f64,
    w_carbon: f64,
    w_comfort: f64,
    cost: f64,
    carbon: f64,
    comfort_criterion: f64,
    on_front: bool,
}

pub fn run_pareto(opts: &RunOptions) -> Result<RunSummary> {
    let loaded = load_config::<ParetoFileConfig>(opts, "pareto")?;
    let cfg = &loaded.config;
    let mut outputs = OutputSet::new("pareto", loaded.seed, Some(loaded.config_sha256.clone()));
    let scenario = load_scenario(
        &mut outputs,
        &loaded.config_dir,
        &cfg.inputs,
        &cfg.hvac,
        &cfg.comfort,
    )?;
    let params = RcModelParams::new(
        cfg.building.resistance,
        cfg.building.capacitance,
        cfg.building.solar_gain,
    );
    let mut grid = Vec::new();
    for &c in &cfg.pareto.cost_weights {
        for &g in &cfg.pareto.carbon_weights {
            for &f in &cfg.pareto.comfort_weights {
                grid.push(ObjectiveWeights::new(c, g, f));
            }
        }
    }
    let sweep = pareto_sweep(
        &grid,
        &params,
        &scenario.hvac,
        &scenario.comfort,
        &scenario.inputs,
        scenario.initial_temp,
        &SolveOptions::default(),
    )?;

    let points: Vec<ParetoPointOut> = sweep
        .points
        .iter()
        .enumerate()
        .map(|(i, p)| ParetoPointOut {
            w_cost: p.weights.cost,
            w_carbon: p.weights.carbon,
            w_comfort: p.weights.comfort,
            cost: p.cost,
            carbon: p.carbon,
            comfort_criterion: p.comfort_criterion,
            on_front: sweep.front.contains(&i),
        })
        .collect();
    let front: Vec<&ParetoPointOut> = points.iter().filter(|p| p.on_front).collect();
    outputs.add_json("pareto_points.json", &points)?;
    outputs.add_json("pareto_front.json", &front)?;
    let rows: Vec<Vec<String>> = points
        .iter()
        .map(|p| {
            vec![
                fmt_f64(p.w_cost),
                fmt_f64(p.w_carbon),
                fmt_f64(p.w_comfort),
                fmt_f64(p.cost),
                fmt_f64(p.carbon),
                fmt_f64(p.comfort_criterion),
                (p.on_front as u8).to_string(),
            ]
        })
        .collect();
    outputs.add(
        "pareto_points.csv".to_string(),
        csv_bytes(
            &[
                "w_cost",
                "w_carbon",
                "w_comfort",
                "cost",
                "carbon",
                "comfort_criterion",
                "on_front",
            ],
            rows,
        )?,
    );
    outputs.write(&loaded.out_dir)
}
