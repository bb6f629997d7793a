//! Sweep the cost/carbon/comfort weights over a winter week and print the
//! non-dominated front.
//!
//! Run with: cargo run --release --example pareto_sweep

use enopt::building::{default_weight_grid, pareto_sweep, HvacSpec};
use enopt::milp::SolveOptions;
use enopt::synth;

fn main() {
    let seed = 42;
    let steps = 144; // three winter days, half-hourly
    let inputs = synth::winter_inputs(seed, steps).unwrap();
    let comfort = synth::office_comfort(steps).unwrap();
    let params = synth::reference_building();
    let hvac = HvacSpec::heating_only(16.0, 1.0);

    let grid = default_weight_grid();
    println!("sweeping {} weight triples over {steps} steps...", grid.len());
    let sweep = pareto_sweep(
        &grid,
        &params,
        &hvac,
        &comfort,
        &inputs,
        17.0,
        &SolveOptions::default(),
    )
    .unwrap();

    println!(
        "{:>8} {:>8} {:>9} | {:>9} {:>11} {:>8} | front",
        "w_cost", "w_co2", "w_comf", "cost £", "carbon kg", "comfort"
    );
    for (i, p) in sweep.points.iter().enumerate() {
        println!(
            "{:>8.2} {:>8.3} {:>9.1} | {:>9.2} {:>11.1} {:>8.3} | {}",
            p.weights.cost,
            p.weights.carbon,
            p.weights.comfort,
            p.cost,
            p.carbon / 1000.0,
            p.comfort_criterion,
            if sweep.front.contains(&i) { "*" } else { "" }
        );
    }
    println!(
        "\n{} of {} points are non-dominated",
        sweep.front.len(),
        sweep.points.len()
    );
}
