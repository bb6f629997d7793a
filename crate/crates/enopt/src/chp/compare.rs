//! Baseline-versus-optimised savings accounting.

use serde::Serialize;

use super::NetworkSchedule;

/// Savings of an optimised schedule over the rules-based baseline, based on
/// real cost. `value_realised_pct` is reported when an actually-run
/// schedule is supplied: the share of the theoretical saving that operation
/// captured.
#[derive(Debug, Clone, Serialize)]
pub struct SavingsReport {
    pub baseline_cost: f64,
    pub optimised_cost: f64,
    pub actual_cost: Option<f64>,
    /// Baseline → optimised real-cost reduction, %. Floored at zero.
    pub reduction_pct: f64,
    /// (baseline - actual) / (baseline - optimised), %.
    pub value_realised_pct: Option<f64>,
    /// Set when the baseline does not beat the optimised cost, which should
    /// not happen for a feasible rule on the same scenario.
    pub optimality_warning: bool,
}

pub fn compare(
    baseline: &NetworkSchedule,
    optimised: &NetworkSchedule,
    actual: Option<&NetworkSchedule>,
) -> SavingsReport {
    let b = baseline.real_cost;
    let o = optimised.real_cost;
    let saving = b - o;
    let degenerate = saving <= 0.0 || b == 0.0;
    let reduction_pct = if degenerate { 0.0 } else { saving / b * 100.0 };
    let value_realised_pct = match (actual, degenerate) {
        (Some(a), false) => Some((b - a.real_cost) / saving * 100.0),
        _ => None,
    };
    SavingsReport {
        baseline_cost: b,
        optimised_cost: o,
        actual_cost: actual.map(|a| a.real_cost),
        reduction_pct,
        value_realised_pct,
        optimality_warning: degenerate,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chp::{CostBreakdown, NetworkSchedule};

    fn schedule(real_cost: f64) -> NetworkSchedule {
        NetworkSchedule {
            steps: Vec::new(),
            real_cost,
            artificial_cost: 0.0,
            breakdown: CostBreakdown {
                gas: real_cost,
                import: 0.0,
                export_revenue: 0.0,
                maintenance: 0.0,
                artificial: 0.0,
                total: real_cost,
            },
            restarts_per_day: Vec::new(),
        }
    }

    #[test]
    fn twenty_percent_reduction() {
        let r = compare(&schedule(100.0), &schedule(80.0), None);
        assert!((r.reduction_pct - 20.0).abs() < 1e-12);
        assert!(!r.optimality_warning);
        assert!(r.value_realised_pct.is_none());
    }

    #[test]
    fn half_the_value_realised() {
        let r = compare(&schedule(100.0), &schedule(80.0), Some(&schedule(90.0)));
        assert!((r.value_realised_pct.unwrap() - 50.0).abs() < 1e-12);
    }

    #[test]
    fn identical_schedules_flagged() {
        let r = compare(&schedule(100.0), &schedule(100.0), Some(&schedule(100.0)));
        assert_eq!(r.reduction_pct, 0.0);
        assert!(r.value_realised_pct.is_none());
        assert!(r.optimality_warning);
    }
}
