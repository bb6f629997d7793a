//! Battery/PV dispatch strategies under the four tariff structures, plus a
//! twin evaluation against noisy "metered" PV.
//!
//! Run with: cargo run --release --example ems_dispatch

use enopt::ems::{
    baseline_dispatch, evaluate_twin, optimise_cost, optimise_self_consumption, simulate_pv,
    tariff_scenarios, BatterySpec, PvSpec, StrategyKind, TwinContext,
};
use enopt::milp::SolveOptions;
use enopt::synth;

fn main() {
    let seed = 42;
    let (irradiance, ambient, load) = synth::ems_site(seed, 336).unwrap();
    let pv_spec = PvSpec {
        dc_rating: 40.0,
        derate_coeff: 0.004,
        ref_temp: 25.0,
        system_efficiency: 0.88,
        irradiance_at_rating: 1000.0,
    };
    let battery = BatterySpec {
        e_cap: 100.0,
        soc_min: 10.0,
        soc_max: 90.0,
        p_max: 50.0,
        eta_c: 0.95,
        eta_d: 0.95,
        cycle_limit: None,
        initial_soc: 10.0,
    };
    let pv = simulate_pv(&irradiance, &ambient, &pv_spec).unwrap();
    println!(
        "week of PV: {:.1} kWh generated against {:.1} kWh of load",
        pv.values().iter().sum::<f64>(),
        load.values().iter().sum::<f64>()
    );

    let carbon = synth::winter_inputs(seed, 336).unwrap().carbon_intensity;
    let tariffs = tariff_scenarios(0.10, 3.0, 0.05, &carbon, 0.0).unwrap();
    let opts = SolveOptions::default();

    println!(
        "\n{:14} {:>10} {:>18} {:>16}",
        "tariff", "baseline", "self-consumption", "cost-based"
    );
    for (name, tariff) in &tariffs {
        let base = baseline_dispatch(&pv, &load, &battery, tariff).unwrap();
        let selfc =
            optimise_self_consumption(&pv, &load, &battery, tariff, None, &opts).unwrap();
        let cost = optimise_cost(&pv, &load, &battery, tariff, None, &opts).unwrap();
        println!(
            "{name:14} £{:>9.2} £{:>11.2} ({:>4.1}%) £{:>9.2} ({:>4.1}%)",
            base.cost,
            selfc.cost,
            (base.cost - selfc.cost) / base.cost * 100.0,
            cost.cost,
            (base.cost - cost.cost) / base.cost * 100.0
        );
    }

    // Peak shaving on the peak/off-peak tariff.
    let tariff = &tariffs[1].1;
    let shaved = optimise_cost(&pv, &load, &battery, tariff, Some(6.0), &opts).unwrap();
    let peak_import = shaved
        .import
        .values()
        .iter()
        .cloned()
        .fold(0.0f64, f64::max);
    println!(
        "\npeak shaving at 6 kWh/step: max import {:.2} kWh, cost £{:.2}, {:.2} cycles",
        peak_import, shaved.cost, shaved.cycles
    );

    // How much does PV forecast error move the bill?
    let measured = synth::noisy_measurement(&pv, seed, 0.05).unwrap();
    let twin = evaluate_twin(
        &pv,
        &measured,
        &TwinContext {
            load: load.clone(),
            battery: battery.clone(),
            tariff: tariffs[0].1.clone(),
            strategy: StrategyKind::Baseline,
            solve: opts,
        },
    )
    .unwrap();
    println!(
        "twin vs noisy metering: nmae {:.3}, smape {:.1}%, r2 {:.3}, cost impact {:.2}%",
        twin.accuracy.nmae.unwrap(),
        twin.accuracy.smape * 100.0,
        twin.accuracy.r2.unwrap(),
        twin.cost_impact_pct.unwrap()
    );
}
