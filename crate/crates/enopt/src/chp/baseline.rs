//! Rules-based legacy schedule: fixed daily window, fixed load.

use super::{schedule_from_steps, DispatchStep, NetworkScenario, NetworkSchedule, SiteAssets};
use chrono::Timelike;

use crate::{Error, Result};

/// "Run at `load_fraction` between `start_hour` and `end_hour`" (UTC hours;
/// a window wrapping midnight is allowed, and `start == end` means never).
#[derive(Debug, Clone, Copy)]
pub struct BaselineRule {
    pub start_hour: u32,
    pub end_hour: u32,
    pub load_fraction: f64,
}

impl BaselineRule {
    fn contains(&self, hour: u32) -> bool {
        if self.start_hour == self.end_hour {
            false
        } else if self.start_hour < self.end_hour {
            (self.start_hour..self.end_hour).contains(&hour)
        } else {
            hour >= self.start_hour || hour < self.end_hour
        }
    }
}

/// Simulates the legacy rule directly, without optimisation. Inside the
/// window the CHP runs at the rule's load, modulating down (never below
/// minimum load; below that it switches off) when demand plus store
/// headroom cannot absorb its heat. Surplus heat charges the store
/// greedily; deficits draw the store down before the boilers cover the
/// rest. Costs come from the same evaluator as the optimiser.
pub fn baseline_schedule(
    scenario: &NetworkScenario,
    assets: &SiteAssets,
    rule: &BaselineRule,
) -> Result<NetworkSchedule> {
    scenario.validate()?;
    assets.validate()?;
    if rule.start_hour > 24 || rule.end_hour > 24 {
        return Err(Error::InvalidInput(
            "baseline window hours must be within 0..=24".into(),
        ));
    }
    let chp = &assets.chp;
    if !(chp.min_load_fraction..=1.0).contains(&rule.load_fraction) {
        return Err(Error::InvalidInput(format!(
            "baseline load fraction {} outside [{}, 1]",
            rule.load_fraction, chp.min_load_fraction
        )));
    }

    let n = scenario.len();
    let dt = scenario.dt_hours();
    let mut soe = assets.store.as_ref().map(|s| s.initial_soe).unwrap_or(0.0);
    let mut prev_on = scenario.chp_initially_on;
    let mut steps = Vec::with_capacity(n);

    for t in 0..n {
        let hour = scenario.elec_demand.timestamp(t).hour();
        let heat_demand = scenario.heat_demand.value(t);
        let elec_demand = scenario.elec_demand.value(t);

        let headroom = assets
            .store
            .as_ref()
            .map(|s| s.max_charge_rate.min((s.capacity - soe) / dt))
            .unwrap_or(0.0);

        let mut load = 0.0;
        if rule.contains(hour % 24) {
            let desired = rule.load_fraction;
            let absorbable = heat_demand + headroom;
            if desired * chp.heat_capacity <= absorbable {
                load = desired;
            } else {
                let reduced = absorbable / chp.heat_capacity;
                load = if reduced >= chp.min_load_fraction {
                    reduced
                } else {
                    0.0
                };
            }
        }

        let on = load > 0.0;
        let q_chp = load * chp.heat_capacity;
        let e_chp = load * chp.elec_capacity;

        let surplus = q_chp - heat_demand;
        let (q_charge, q_discharge, q_boiler);
        if surplus >= 0.0 {
            q_charge = surplus; // within headroom by construction
            q_discharge = 0.0;
            q_boiler = 0.0;
        } else {
            let deficit = -surplus;
            let available = assets
                .store
                .as_ref()
                .map(|s| s.max_discharge_rate.min((soe - s.min_level) / dt))
                .unwrap_or(0.0);
            q_charge = 0.0;
            q_discharge = deficit.min(available);
            q_boiler = deficit - q_discharge;
            if q_boiler > assets.boiler.heat_capacity + 1e-9 {
                return Err(Error::Infeasible(format!(
                    "baseline rule leaves {q_boiler:.3} kW of heat demand at step {t}, \
                     beyond the boiler capacity {}",
                    assets.boiler.heat_capacity
                )));
            }
        }
        soe += (q_charge - q_discharge) * dt;

        let net = e_chp - elec_demand;
        let restart = on && !prev_on;
        prev_on = on;
        steps.push(DispatchStep {
            chp_on: on,
            chp_load: load,
            restart,
            e_chp,
            e_import: (-net).max(0.0),
            e_export: net.max(0.0),
            q_chp,
            q_boiler,
            q_charge,
            q_discharge,
            soe,
        });
    }
    Ok(schedule_from_steps(scenario, assets, steps))
}

#[cfg(test)]
mod tests {
    use chrono::Duration;

    use super::*;
    use crate::chp::{ArtificialCosts, BoilerSpec, ChpSpec, ThermalStoreSpec};
    use crate::series::{t0, TimeSeries};

    fn series(values: Vec<f64>) -> TimeSeries {
        TimeSeries::new(t0(), Duration::hours(1), values, "kW").unwrap()
    }

    fn assets(store: Option<ThermalStoreSpec>) -> SiteAssets {
        SiteAssets {
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
            store,
        }
    }

    fn scenario(heat: Vec<f64>) -> NetworkScenario {
        let n = heat.len();
        NetworkScenario {
            elec_demand: series(vec![30.0; n]),
            heat_demand: series(heat),
            gas_price: series(vec![0.03; n]),
            import_price: series(vec![0.2; n]),
            export_price: series(vec![0.05; n]),
            max_daily_restarts: 2,
            chp_initially_on: false,
            artificial: ArtificialCosts::default(),
        }
    }

    #[test]
    fn all_day_window_runs_continuously() {
        let sc = scenario(vec![130.0; 6]);
        let rule = BaselineRule {
            start_hour: 0,
            end_hour: 24,
            load_fraction: 1.0,
        };
        let sched = baseline_schedule(&sc, &assets(None), &rule).unwrap();
        assert!(sched.steps.iter().all(|s| s.chp_on));
        let restarts: u32 = sched.restarts_per_day.iter().map(|(_, c)| c).sum();
        assert_eq!(restarts, 1);
    }

    #[test]
    fn empty_window_is_boiler_only() {
        let sc = scenario(vec![90.0; 4]);
        let rule = BaselineRule {
            start_hour: 7,
            end_hour: 7,
            load_fraction: 1.0,
        };
        let sched = baseline_schedule(&sc, &assets(None), &rule).unwrap();
        for s in &sched.steps {
            assert!(!s.chp_on);
            assert!((s.q_boiler - 90.0).abs() < 1e-9);
            assert!((s.e_import - 30.0).abs() < 1e-9);
        }
    }

    #[test]
    fn surplus_charges_store_until_full_then_modulates() {
        // CHP at full load makes 120 kW of heat against 60 kW of demand;
        // the 40 kWh of store headroom absorbs 40 kW for one hour, after
        // which the CHP must turn itself down to 100 kW of heat.
        let store = ThermalStoreSpec {
            capacity: 100.0,
            min_level: 0.0,
            max_charge_rate: 80.0,
            max_discharge_rate: 80.0,
            initial_soe: 60.0,
        };
        let sc = scenario(vec![60.0, 60.0, 60.0]);
        let rule = BaselineRule {
            start_hour: 0,
            end_hour: 24,
            load_fraction: 1.0,
        };
        let sched = baseline_schedule(&sc, &assets(Some(store)), &rule).unwrap();
        let s0 = &sched.steps[0];
        assert!((s0.q_charge - 40.0).abs() < 1e-9);
        assert!((s0.soe - 100.0).abs() < 1e-9);
        assert_eq!(s0.q_boiler, 0.0);
        // Store full: CHP modulates down to exactly meet demand.
        let s1 = &sched.steps[1];
        assert!((s1.q_chp - 60.0).abs() < 1e-9);
        assert_eq!(s1.q_charge, 0.0);
        assert_eq!(s1.q_boiler, 0.0);
    }

    #[test]
    fn window_wrapping_midnight() {
        let rule = BaselineRule {
            start_hour: 22,
            end_hour: 6,
            load_fraction: 1.0,
        };
        assert!(rule.contains(23));
        assert!(rule.contains(0));
        assert!(!rule.contains(12));
    }

    #[test]
    fn unmeetable_heat_errors() {
        let sc = scenario(vec![400.0; 2]);
        let rule = BaselineRule {
            start_hour: 0,
            end_hour: 0,
            load_fraction: 1.0,
        };
        assert!(baseline_schedule(&sc, &assets(None), &rule).is_err());
    }
}
