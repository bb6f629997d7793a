//! CHP heat-network scheduling: optimise two days of dispatch and compare
//! against the legacy "run flat out in a fixed window" rule.
//!
//! Run with: cargo run --release --example chp_schedule

use enopt::chp::{
    baseline_schedule, compare, optimise, BaselineRule, BoilerSpec, ChpSpec, SiteAssets,
    ThermalStoreSpec,
};
use enopt::milp::SolveOptions;
use enopt::synth;

fn main() {
    let scenario = synth::chp_scenario(42, 48).unwrap();
    let assets = SiteAssets {
        chp: ChpSpec {
            elec_capacity: 100.0,
            heat_capacity: 120.0,
            gas_per_elec: 2.2,
            min_load_fraction: 0.4,
            maintenance_cost_per_hour: 1.0,
        },
        boiler: BoilerSpec {
            heat_capacity: 250.0,
            efficiency: 0.9,
        },
        store: Some(ThermalStoreSpec {
            capacity: 300.0,
            min_level: 30.0,
            max_charge_rate: 100.0,
            max_discharge_rate: 100.0,
            initial_soe: 100.0,
        }),
    };
    let rule = BaselineRule {
        start_hour: 7,
        end_hour: 24,
        load_fraction: 1.0,
    };

    println!("optimising {} hourly steps...", scenario.len());
    let optimised = optimise(&scenario, &assets, &SolveOptions::default()).unwrap();
    let legacy = baseline_schedule(&scenario, &assets, &rule).unwrap();

    println!("\nhour  on load  import  export  boiler   charge discharge    SOE");
    for (t, s) in optimised.steps.iter().enumerate().take(24) {
        println!(
            "{t:>4} {:>3} {:>4.2} {:>7.1} {:>7.1} {:>7.1} {:>8.1} {:>9.1} {:>6.1}",
            if s.chp_on { "on" } else { "off" },
            s.chp_load,
            s.e_import,
            s.e_export,
            s.q_boiler,
            s.q_charge,
            s.q_discharge,
            s.soe
        );
    }

    let report = |label: &str, sched: &enopt::chp::NetworkSchedule| {
        let b = &sched.breakdown;
        println!(
            "{label:10} gas £{:>7.2}  import £{:>5.2}  export -£{:>6.2}  maint £{:>5.2}  \
             artificial £{:>5.2}  real £{:>7.2}",
            b.gas, b.import, b.export_revenue, b.maintenance, b.artificial, sched.real_cost
        );
    };
    println!();
    report("baseline", &legacy);
    report("optimised", &optimised);

    let savings = compare(&legacy, &optimised, None);
    println!(
        "\nestimated running-cost reduction, baseline -> optimised: {:.1}%",
        savings.reduction_pct
    );
    let restarts: u32 = optimised.restarts_per_day.iter().map(|(_, c)| c).sum();
    println!(
        "restarts across the horizon: {restarts} (cap {} per day)",
        scenario.max_daily_restarts
    );
}
