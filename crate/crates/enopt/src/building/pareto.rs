//! Objective-weight sweeps and the non-dominated front.

use super::{
    optimise_horizon, ComfortSpec, HvacSpec, ObjectiveWeights, RcModelParams, ScenarioInputs,
};
use crate::milp::SolveOptions;
use crate::Result;

/// Outcome of one weight triple.
#[derive(Debug, Clone)]
pub struct ParetoPoint {
    pub weights: ObjectiveWeights,
    pub cost: f64,
    pub carbon: f64,
    pub comfort_criterion: f64,
}

/// All swept points plus the indices of the non-dominated subset
/// (minimise cost and carbon, maximise comfort).
#[derive(Debug, Clone)]
pub struct ParetoSweep {
    pub points: Vec<ParetoPoint>,
    pub front: Vec<usize>,
}

/// The default weight grid used by the scenario runner.
pub fn default_weight_grid() -> Vec<ObjectiveWeights> {
    let mut grid = Vec::new();
    for &cost in &[0.5, 1.0] {
        for &carbon in &[0.0, 0.002] {
            for &comfort in &[0.2, 2.0, 20.0] {
                grid.push(ObjectiveWeights::new(cost, carbon, comfort));
            }
        }
    }
    grid
}

/// Runs [`optimise_horizon`] once per weight triple and extracts the
/// maximal non-dominated subset of (cost, carbon, comfort) outcomes.
#[allow(clippy::too_many_arguments)]
pub fn pareto_sweep(
    grid: &[ObjectiveWeights],
    params: &RcModelParams,
    hvac: &HvacSpec,
    comfort: &ComfortSpec,
    inputs: &ScenarioInputs,
    initial_temp: f64,
    opts: &SolveOptions,
) -> Result<ParetoSweep> {
    if grid.is_empty() {
        return Err(crate::Error::InvalidInput("empty weight grid".into()));
    }
    let mut points = Vec::with_capacity(grid.len());
    for w in grid {
        let sched = optimise_horizon(params, hvac, comfort, w, inputs, initial_temp, opts)?;
        points.push(ParetoPoint {
            weights: *w,
            cost: sched.cost,
            carbon: sched.carbon,
            comfort_criterion: sched.comfort_criterion,
        });
    }
    let front = non_dominated(&points);
    Ok(ParetoSweep { points, front })
}

/// Indices of points not dominated by any other. `a` dominates `b` when it
/// is no worse on all three axes and strictly better on at least one.
pub fn non_dominated(points: &[ParetoPoint]) -> Vec<usize> {
    (0..points.len())
        .filter(|&i| !points.iter().any(|other| dominates(other, &points[i])))
        .collect()
}

fn dominates(a: &ParetoPoint, b: &ParetoPoint) -> bool {
    let no_worse =
        a.cost <= b.cost && a.carbon <= b.carbon && a.comfort_criterion >= b.comfort_criterion;
    let strictly_better =
        a.cost < b.cost || a.carbon < b.carbon || a.comfort_criterion > b.comfort_criterion;
    no_worse && strictly_better
}
