//! CHP heat-network scheduling.
//!
//! One CHP engine, one boiler, and an optional thermal store serve a site's
//! electricity and heat demand. The optimiser builds a MILP whose objective
//! is the real operating cost (gas, grid import net of export revenue,
//! maintenance on running hours) plus artificial preference costs steering
//! the solution toward smooth operation; restarts are detected per step and
//! capped per calendar day. A rules-based baseline simulates the legacy
//! fixed-window schedule for comparison.

mod baseline;
mod compare;
mod problem;

pub use baseline::{baseline_schedule, BaselineRule};
pub use compare::{compare, SavingsReport};
pub use problem::{build_problem, optimise};

use chrono::NaiveDate;
use serde::Serialize;

use crate::series::TimeSeries;
use crate::{Error, Result};

/// CHP engine parameters. Heat and electricity scale together with the
/// load fraction; gas consumption is linear in electrical output.
#[derive(Debug, Clone)]
pub struct ChpSpec {
    /// Electrical output at full load, kW.
    pub elec_capacity: f64,
    /// Heat output at full load, kW.
    pub heat_capacity: f64,
    /// Gas drawn per unit of electricity generated, kWh/kWh.
    pub gas_per_elec: f64,
    /// Minimum stable load fraction when running.
    pub min_load_fraction: f64,
    /// Maintenance cost per running hour, £.
    pub maintenance_cost_per_hour: f64,
}

#[derive(Debug, Clone)]
pub struct BoilerSpec {
    /// Heat output limit, kW.
    pub heat_capacity: f64,
    /// Heat delivered per unit of gas, fraction in (0, 1].
    pub efficiency: f64,
}

#[derive(Debug, Clone)]
pub struct ThermalStoreSpec {
    /// Maximum state of energy, kWh.
    pub capacity: f64,
    /// Minimum state of energy, kWh.
    pub min_level: f64,
    /// kW. Charging absorbs surplus heat.
    pub max_charge_rate: f64,
    /// kW. Discharging serves demand.
    pub max_discharge_rate: f64,
    /// State of energy entering the horizon, kWh.
    pub initial_soe: f64,
}

#[derive(Debug, Clone)]
pub struct SiteAssets {
    pub chp: ChpSpec,
    pub boiler: BoilerSpec,
    pub store: Option<ThermalStoreSpec>,
}

impl SiteAssets {
    pub fn validate(&self) -> Result<()> {
        let c = &self.chp;
        if !(c.elec_capacity > 0.0) || !(c.heat_capacity > 0.0) {
            return Err(Error::InvalidInput("CHP capacities must be positive".into()));
        }
        if !(0.0..=1.0).contains(&c.min_load_fraction) {
            return Err(Error::InvalidInput(
                "CHP minimum load fraction must be within [0, 1]".into(),
            ));
        }
        if c.gas_per_elec < 0.0 || c.maintenance_cost_per_hour < 0.0 {
            return Err(Error::InvalidInput("CHP cost terms must be non-negative".into()));
        }
        let b = &self.boiler;
        if !(b.efficiency > 0.0 && b.efficiency <= 1.0) {
            return Err(Error::InvalidInput("boiler efficiency must be in (0, 1]".into()));
        }
        if !(b.heat_capacity >= 0.0) {
            return Err(Error::InvalidInput("boiler capacity must be non-negative".into()));
        }
        if let Some(s) = &self.store {
            if !(0.0 <= s.min_level && s.min_level <= s.initial_soe && s.initial_soe <= s.capacity)
            {
                return Err(Error::InvalidInput(
                    "thermal store must satisfy 0 <= min <= initial <= capacity".into(),
                ));
            }
            if s.max_charge_rate < 0.0 || s.max_discharge_rate < 0.0 {
                return Err(Error::InvalidInput("store rates must be non-negative".into()));
            }
        }
        Ok(())
    }
}

/// Non-physical penalty coefficients steering the optimiser toward
/// operationally preferred schedules.
#[derive(Debug, Clone, Copy, Default)]
pub struct ArtificialCosts {
    /// £ per kWh imported.
    pub import_pref: f64,
    /// £ per kWh of CHP heat produced.
    pub chp_pref: f64,
    /// £ per kWh of boiler heat produced.
    pub boiler_pref: f64,
    /// £ per restart event.
    pub restart: f64,
}

/// One site scenario: demands, prices, and operating policy knobs.
#[derive(Debug, Clone)]
pub struct NetworkScenario {
    /// Electrical demand, kW.
    pub elec_demand: TimeSeries,
    /// Heat demand, kW.
    pub heat_demand: TimeSeries,
    /// £/kWh.
    pub gas_price: TimeSeries,
    /// £/kWh.
    pub import_price: TimeSeries,
    /// £/kWh.
    pub export_price: TimeSeries,
    /// Restart budget per UTC calendar day.
    pub max_daily_restarts: u32,
    /// CHP state entering the horizon.
    pub chp_initially_on: bool,
    pub artificial: ArtificialCosts,
}

impl NetworkScenario {
    pub fn validate(&self) -> Result<()> {
        self.elec_demand
            .check_aligned(&self.heat_demand, "heat demand")?;
        self.elec_demand.check_aligned(&self.gas_price, "gas price")?;
        self.elec_demand
            .check_aligned(&self.import_price, "import price")?;
        self.elec_demand
            .check_aligned(&self.export_price, "export price")?;
        if self.elec_demand.is_empty() {
            return Err(Error::InvalidInput("scenario has no steps".into()));
        }
        for (name, s) in [
            ("electricity demand", &self.elec_demand),
            ("heat demand", &self.heat_demand),
            ("gas price", &self.gas_price),
            ("import price", &self.import_price),
            ("export price", &self.export_price),
        ] {
            let values = s.dense()?;
            if values.iter().any(|v| *v < 0.0) {
                return Err(Error::InvalidInput(format!("{name} has negative values")));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.elec_demand.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elec_demand.is_empty()
    }

    pub fn dt_hours(&self) -> f64 {
        self.elec_demand.resolution_hours()
    }

    /// Step indices grouped by UTC calendar day, in order.
    pub(crate) fn day_groups(&self) -> Vec<(NaiveDate, Vec<usize>)> {
        let mut groups: Vec<(NaiveDate, Vec<usize>)> = Vec::new();
        for t in 0..self.len() {
            let day = self.elec_demand.timestamp(t).date_naive();
            match groups.last_mut() {
                Some((d, idx)) if *d == day => idx.push(t),
                _ => groups.push((day, vec![t])),
            }
        }
        groups
    }
}

/// One decoded dispatch step. Power values are kW; `soe` is the store's
/// state of energy at the end of the step, kWh.
#[derive(Debug, Clone, Serialize)]
pub struct DispatchStep {
    pub chp_on: bool,
    pub chp_load: f64,
    pub restart: bool,
    pub e_chp: f64,
    pub e_import: f64,
    pub e_export: f64,
    pub q_chp: f64,
    pub q_boiler: f64,
    pub q_charge: f64,
    pub q_discharge: f64,
    pub soe: f64,
}

/// Real-cost split mirroring the objective's physical terms, plus the
/// artificial total. `total = gas + import - export_revenue + maintenance
/// + artificial`.
#[derive(Debug, Clone, Serialize)]
pub struct CostBreakdown {
    pub gas: f64,
    pub import: f64,
    pub export_revenue: f64,
    pub maintenance: f64,
    pub artificial: f64,
    pub total: f64,
}

/// A full dispatch plan with its cost accounting.
#[derive(Debug, Clone)]
pub struct NetworkSchedule {
    pub steps: Vec<DispatchStep>,
    /// Gas + import - export revenue + maintenance, £.
    pub real_cost: f64,
    /// Preference and restart penalties, £.
    pub artificial_cost: f64,
    pub breakdown: CostBreakdown,
    pub restarts_per_day: Vec<(NaiveDate, u32)>,
}

/// Evaluates the cost of a dispatch plan from first principles; both the
/// optimiser decode and the rules-based baseline go through here so their
/// costs are comparable by construction.
pub(crate) fn evaluate_costs(
    scenario: &NetworkScenario,
    assets: &SiteAssets,
    steps: &[DispatchStep],
) -> CostBreakdown {
    let dt = scenario.dt_hours();
    let mut gas = 0.0;
    let mut import = 0.0;
    let mut export_revenue = 0.0;
    let mut maintenance = 0.0;
    let mut artificial = 0.0;
    for (t, s) in steps.iter().enumerate() {
        let gas_kw = s.e_chp * assets.chp.gas_per_elec + s.q_boiler / assets.boiler.efficiency;
        gas += gas_kw * scenario.gas_price.value(t) * dt;
        import += s.e_import * scenario.import_price.value(t) * dt;
        export_revenue += s.e_export * scenario.export_price.value(t) * dt;
        if s.chp_on {
            maintenance += assets.chp.maintenance_cost_per_hour * dt;
        }
        artificial += scenario.artificial.import_pref * s.e_import * dt
            + scenario.artificial.chp_pref * s.q_chp * dt
            + scenario.artificial.boiler_pref * s.q_boiler * dt;
        if s.restart {
            artificial += scenario.artificial.restart;
        }
    }
    let total = gas + import - export_revenue + maintenance + artificial;
    CostBreakdown {
        gas,
        import,
        export_revenue,
        maintenance,
        artificial,
        total,
    }
}

pub(crate) fn schedule_from_steps(
    scenario: &NetworkScenario,
    assets: &SiteAssets,
    steps: Vec<DispatchStep>,
) -> NetworkSchedule {
    let breakdown = evaluate_costs(scenario, assets, &steps);
    let restarts_per_day = scenario
        .day_groups()
        .into_iter()
        .map(|(day, idx)| {
            let count = idx.iter().filter(|&&t| steps[t].restart).count() as u32;
            (day, count)
        })
        .collect();
    NetworkSchedule {
        real_cost: breakdown.gas + breakdown.import - breakdown.export_revenue
            + breakdown.maintenance,
        artificial_cost: breakdown.artificial,
        breakdown,
        steps,
        restarts_per_day,
    }
}
