//! `synth`: writes the bundled synthetic dataset plus ready-to-run configs
//! for every other command.

use super::{csv_bytes, fmt_f64, OutputSet, RunOptions, RunSummary};
use crate::ems::{simulate_pv, PvSpec};
use crate::series::TimeSeries;
use crate::synth;
use crate::{Error, Result};

/// One CSV table from aligned series.
fn table_csv(columns: &[(&str, &TimeSeries)]) -> Result<Vec<u8>> {
    let (_, first) = columns
        .first()
        .ok_or_else(|| Error::InvalidInput("empty table".into()))?;
    for (name, s) in columns {
        first.check_aligned(s, &format!("synth column '{name}'"))?;
    }
    let mut header = vec!["timestamp"];
    header.extend(columns.iter().map(|(n, _)| *n));
    let rows: Vec<Vec<String>> = (0..first.len())
        .map(|k| {
            let mut row = vec![first
                .timestamp(k)
                .to_rfc3339_opts(chrono::SecondsFormat::Secs, true)];
            row.extend(columns.iter().map(|(_, s)| fmt_f64(s.value(k))));
            row
        })
        .collect();
    csv_bytes(&header, rows)
}

pub fn run(opts: &RunOptions) -> Result<RunSummary> {
    let out_dir = opts.out_dir.clone().ok_or_else(|| {
        Error::InvalidInput("synth: --out <dir> is required".into())
    })?;
    let seed = opts.seed.unwrap_or(0);
    let mut outputs = OutputSet::new("synth", seed, None);

    // Metered portfolio: four weeks half-hourly, eight meters, plus weather
    // covering the history and one forecast horizon beyond it.
    let weeks = 4;
    let history_len = weeks * 7 * 48;
    let horizon = 48;
    let (records, hierarchy) = synth::meter_fleet(seed, weeks)?;
    let meter_cols: Vec<(&str, &TimeSeries)> = records
        .iter()
        .map(|r| (r.meter_id.as_str(), &r.series))
        .collect();
    outputs.add("meters.csv".to_string(), table_csv(&meter_cols)?);

    let weather = synth::weather_exogenous(seed, history_len + horizon);
    let start = synth::week_start();
    let res = chrono::Duration::minutes(30);
    let weather_series: Vec<(String, TimeSeries)> = weather
        .names()
        .enumerate()
        .map(|(i, name)| {
            let (_, values) = weather.column(i).clone();
            Ok((
                name.to_string(),
                TimeSeries::new(start, res, values, "")?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let weather_cols: Vec<(&str, &TimeSeries)> = weather_series
        .iter()
        .map(|(n, s)| (n.as_str(), s))
        .collect();
    outputs.add("weather.csv".to_string(), table_csv(&weather_cols)?);

    // Building: fitting history and a winter optimisation week.
    let plant = synth::reference_building();
    let history = synth::building_fit_history(&plant, seed, 672, 0.05)?;
    outputs.add(
        "building_history.csv".to_string(),
        table_csv(&[
            ("indoor_temp", &history.indoor_temp),
            ("outdoor_temp", &history.outdoor_temp),
            ("irradiance", &history.irradiance),
            ("q_hvac", &history.q_hvac),
        ])?,
    );
    let winter = synth::winter_inputs(seed, 336)?;
    outputs.add(
        "building_scenario.csv".to_string(),
        table_csv(&[
            ("outdoor_temp", &winter.outdoor_temp),
            ("irradiance", &winter.irradiance),
            ("energy_price", &winter.energy_price),
            ("carbon_intensity", &winter.carbon_intensity),
        ])?,
    );

    // Heat network: two days at hourly resolution.
    let chp = synth::chp_scenario(seed, 48)?;
    outputs.add(
        "chp_scenario.csv".to_string(),
        table_csv(&[
            ("elec_demand", &chp.elec_demand),
            ("heat_demand", &chp.heat_demand),
            ("gas_price", &chp.gas_price),
            ("import_price", &chp.import_price),
            ("export_price", &chp.export_price),
        ])?,
    );

    // School site for the dispatch strategies, with a noisy "metered" PV
    // series for the twin evaluation.
    let (irradiance, ambient, load) = synth::ems_site(seed, 336)?;
    let pv_spec = PvSpec {
        dc_rating: 40.0,
        derate_coeff: 0.004,
        ref_temp: 25.0,
        system_efficiency: 0.88,
        irradiance_at_rating: 1000.0,
    };
    let pv = simulate_pv(&irradiance, &ambient, &pv_spec)?;
    let measured_pv = synth::noisy_measurement(&pv, seed, 0.05)?;
    let carbon = winter.carbon_intensity.clone();
    outputs.add(
        "ems_site.csv".to_string(),
        table_csv(&[
            ("irradiance", &irradiance),
            ("ambient_temp", &ambient),
            ("load", &load),
            ("carbon_intensity", &carbon),
            ("measured_pv", &measured_pv),
        ])?,
    );

    // Ready-to-run configs pointing at the files above.
    let mut hier = String::new();
    hier.push_str("[forecast.hierarchy.meters]\n");
    for (m, c) in &hierarchy.meter_to_contract {
        hier.push_str(&format!("\"{m}\" = \"{c}\"\n"));
    }
    hier.push_str("\n[forecast.hierarchy.contracts]\n");
    for (c, s) in &hierarchy.contract_to_sector {
        hier.push_str(&format!("\"{c}\" = \"{s}\"\n"));
    }
    hier.push_str("\n[forecast.hierarchy.sectors]\n");
    for (s, d) in &hierarchy.sector_to_district {
        hier.push_str(&format!("\"{s}\" = \"{d}\"\n"));
    }
    hier.push_str("\n[forecast.hierarchy.districts]\n");
    for (d, p) in &hierarchy.district_to_portfolio {
        hier.push_str(&format!("\"{d}\" = \"{p}\"\n"));
    }
    outputs.add(
        "forecast.toml".to_string(),
        format!(
            r#"out_dir = "out/forecast"
seed = {seed}

[forecast]
meters_csv = "meters.csv"
weather_csv = "weather.csv"
window = 336
horizon = 48
epsilon = 1e-6
levels = ["contract", "sector", "district", "portfolio"]

[forecast.models]
ema_alpha = 0.3
seasonal_length = 48
ar_lags = 48
use_weather_in_ar = true

{hier}"#
        )
        .into_bytes(),
    );
    outputs.add(
        "fit_building.toml".to_string(),
        format!(
            r#"out_dir = "out/fit-building"
seed = {seed}

[fit_building]
history_csv = "building_history.csv"
"#
        )
        .into_bytes(),
    );
    let building_block = r#"[building]
resistance = 2.0
capacitance = 4.0
solar_gain = 0.01

[hvac]
q_max = 16.0
cop_heat = 1.0

[comfort]
target_occupied = 21.0
target_setback = 15.0
band = 1.0
occupied_hours = [8, 18]
weekdays_only = true

[inputs]
scenario_csv = "building_scenario.csv"
initial_temp = 17.0
"#;
    outputs.add(
        "mpc.toml".to_string(),
        format!(
            r#"out_dir = "out/mpc"
seed = {seed}

{building_block}
[weights]
cost = 1.0
carbon = 0.001
comfort = 2.0

[mpc]
horizon = 48
feedback_noise_std = 0.1
process_var = 0.01
baseline_warmup_steps = 6
baseline_deadband = 0.5
"#
        )
        .into_bytes(),
    );
    outputs.add(
        "pareto.toml".to_string(),
        format!(
            r#"out_dir = "out/pareto"
seed = {seed}

{building_block}
[pareto]
cost_weights = [0.5, 1.0]
carbon_weights = [0.0, 0.002]
comfort_weights = [0.2, 2.0, 20.0]
"#
        )
        .into_bytes(),
    );
    outputs.add(
        "chp.toml".to_string(),
        format!(
            r#"out_dir = "out/chp"
seed = {seed}

[chp]
elec_capacity = 100.0
heat_capacity = 120.0
gas_per_elec = 2.2
min_load_fraction = 0.4
maintenance_cost_per_hour = 1.0

[boiler]
heat_capacity = 250.0
efficiency = 0.9

[store]
capacity = 300.0
min_level = 30.0
max_charge_rate = 100.0
max_discharge_rate = 100.0
initial_soe = 100.0

[scenario]
csv = "chp_scenario.csv"
max_daily_restarts = 2
chp_initially_on = false

[artificial]
import_pref = 0.002
boiler_pref = 0.001
restart = 2.0

[baseline]
start_hour = 7
end_hour = 24
load_fraction = 1.0
"#
        )
        .into_bytes(),
    );
    outputs.add(
        "ems.toml".to_string(),
        format!(
            r#"out_dir = "out/ems"
seed = {seed}

[pv]
dc_rating = 40.0
system_efficiency = 0.88
derate_coeff = 0.004

[battery]
e_cap = 100.0
soc_min = 10.0
soc_max = 90.0
p_max = 50.0
eta_c = 0.95
eta_d = 0.95
initial_soc = 10.0

[site]
csv = "ems_site.csv"

[tariffs]
base_price = 0.10
peak_multiplier = 3.0
export_price = 0.05
carbon_weight = 0.0
"#
        )
        .into_bytes(),
    );

    outputs.write(&out_dir)
}
