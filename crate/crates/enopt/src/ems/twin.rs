//! Digital-twin evaluation: prediction accuracy and its cost consequence.

use serde::Serialize;

use super::{
    baseline_dispatch, optimise_cost, optimise_self_consumption, BatterySpec, Tariff,
};
use crate::milp::SolveOptions;
use crate::series::{score, AccuracyReport, TimeSeries};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrategyKind {
    Baseline,
    SelfConsumption,
    CostBased,
}

/// The fixed context a twin evaluation dispatches under: the site load,
/// the battery, the tariff, and which strategy to run.
#[derive(Debug, Clone)]
pub struct TwinContext {
    pub load: TimeSeries,
    pub battery: BatterySpec,
    pub tariff: Tariff,
    pub strategy: StrategyKind,
    pub solve: SolveOptions,
}

#[derive(Debug, Clone, Serialize)]
pub struct TwinReport {
    pub accuracy: AccuracyReport,
    /// |cost(predicted) - cost(measured)| / |cost(measured)| as a
    /// percentage; `None` when the measured-dispatch cost is zero.
    pub cost_impact_pct: Option<f64>,
    pub predicted_cost: f64,
    pub measured_cost: f64,
}

/// Scores a predicted PV series against the measured one, then runs the
/// identical dispatch strategy on both and reports how much the prediction
/// error moves the bill.
pub fn evaluate_twin(
    predicted: &TimeSeries,
    measured: &TimeSeries,
    ctx: &TwinContext,
) -> Result<TwinReport> {
    let accuracy = score(measured, predicted)?;
    let dispatch = |pv: &TimeSeries| -> Result<f64> {
        let r = match ctx.strategy {
            StrategyKind::Baseline => baseline_dispatch(pv, &ctx.load, &ctx.battery, &ctx.tariff)?,
            StrategyKind::SelfConsumption => optimise_self_consumption(
                pv,
                &ctx.load,
                &ctx.battery,
                &ctx.tariff,
                None,
                &ctx.solve,
            )?,
            StrategyKind::CostBased => {
                optimise_cost(pv, &ctx.load, &ctx.battery, &ctx.tariff, None, &ctx.solve)?
            }
        };
        Ok(r.cost)
    };
    let predicted_cost = dispatch(predicted)?;
    let measured_cost = dispatch(measured)?;
    let cost_impact_pct = if measured_cost == 0.0 {
        None
    } else {
        Some((predicted_cost - measured_cost).abs() / measured_cost.abs() * 100.0)
    };
    Ok(TwinReport {
        accuracy,
        cost_impact_pct,
        predicted_cost,
        measured_cost,
    })
}
