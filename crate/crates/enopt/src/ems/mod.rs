//! Energy-management-system twins and dispatch strategies.
//!
//! Physically interpretable models of a solar PV array and a battery feed
//! three dispatch strategies: a greedy rule-based baseline, a
//! self-consumption optimiser that only charges from on-site surplus and
//! only discharges to serve load, and a cost optimiser free to arbitrage
//! the grid under time-of-use tariffs, carbon weighting, cycle limits, and
//! optional peak shaving.

mod battery;
mod pv;
mod strategies;
mod tariff;
mod twin;

pub use battery::battery_step;
pub use pv::simulate_pv;
pub use strategies::{baseline_dispatch, optimise_cost, optimise_self_consumption};
pub use tariff::tariff_scenarios;
pub use twin::{evaluate_twin, StrategyKind, TwinContext, TwinReport};

use crate::series::TimeSeries;
use crate::{Error, Result};

/// Solar array parameters: linear irradiance scaling with simple
/// temperature de-rating; site specifics (tilt, soiling, inverter losses)
/// fold into `system_efficiency`.
#[derive(Debug, Clone)]
pub struct PvSpec {
    /// Nameplate DC rating, kW.
    pub dc_rating: f64,
    /// Output lost per °C above `ref_temp`, fraction/°C.
    pub derate_coeff: f64,
    /// Temperature at which no de-rating applies, °C.
    pub ref_temp: f64,
    /// Overall system efficiency, fraction in (0, 1].
    pub system_efficiency: f64,
    /// Irradiance producing rated output, W/m².
    pub irradiance_at_rating: f64,
}

impl PvSpec {
    pub fn new(dc_rating: f64, system_efficiency: f64) -> Self {
        Self {
            dc_rating,
            derate_coeff: 0.0,
            ref_temp: 25.0,
            system_efficiency,
            irradiance_at_rating: 1000.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dc_rating > 0.0) {
            return Err(Error::InvalidInput("PV DC rating must be positive".into()));
        }
        if !(self.system_efficiency > 0.0 && self.system_efficiency <= 1.0) {
            return Err(Error::InvalidInput(
                "PV system efficiency must be in (0, 1]".into(),
            ));
        }
        if self.derate_coeff < 0.0 || !(self.irradiance_at_rating > 0.0) {
            return Err(Error::InvalidInput("invalid PV spec".into()));
        }
        Ok(())
    }
}

/// Battery parameters. State of charge is a percentage of `e_cap`.
#[derive(Debug, Clone)]
pub struct BatterySpec {
    /// Nominal capacity, kWh.
    pub e_cap: f64,
    /// %, lower operating bound.
    pub soc_min: f64,
    /// %, upper operating bound.
    pub soc_max: f64,
    /// Charge and discharge power limit, kW.
    pub p_max: f64,
    /// Charging efficiency, (0, 1].
    pub eta_c: f64,
    /// Discharging efficiency, (0, 1].
    pub eta_d: f64,
    /// Equivalent full cycles allowed over a horizon; `None` = unlimited.
    pub cycle_limit: Option<f64>,
    /// %, state of charge entering the horizon.
    pub initial_soc: f64,
}

impl BatterySpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.e_cap > 0.0) || !(self.p_max >= 0.0) {
            return Err(Error::InvalidInput(
                "battery capacity must be positive and power non-negative".into(),
            ));
        }
        if !(0.0 <= self.soc_min
            && self.soc_min <= self.initial_soc
            && self.initial_soc <= self.soc_max
            && self.soc_max <= 100.0)
        {
            return Err(Error::InvalidInput(
                "battery must satisfy 0 <= soc_min <= initial <= soc_max <= 100".into(),
            ));
        }
        if !(self.eta_c > 0.0 && self.eta_c <= 1.0 && self.eta_d > 0.0 && self.eta_d <= 1.0) {
            return Err(Error::InvalidInput(
                "battery efficiencies must be in (0, 1]".into(),
            ));
        }
        if let Some(c) = self.cycle_limit {
            if c < 0.0 {
                return Err(Error::InvalidInput("cycle limit must be non-negative".into()));
            }
        }
        Ok(())
    }

    /// Maximum energy the battery may accept in one step without escaping
    /// `soc_max`, kWh.
    pub(crate) fn charge_headroom(&self, soc: f64, dt_hours: f64) -> f64 {
        let by_soc = (self.soc_max - soc) * self.e_cap / (100.0 * self.eta_c);
        by_soc.min(self.p_max * dt_hours).max(0.0)
    }

    /// Maximum energy the battery may deliver in one step without escaping
    /// `soc_min`, kWh.
    pub(crate) fn discharge_available(&self, soc: f64, dt_hours: f64) -> f64 {
        let by_soc = (soc - self.soc_min) * self.e_cap * self.eta_d / 100.0;
        by_soc.min(self.p_max * dt_hours).max(0.0)
    }
}

/// Import pricing over time, a flat export rate, and an optional carbon
/// weighting applied to imported energy.
#[derive(Debug, Clone)]
pub struct Tariff {
    /// £/kWh per step.
    pub import_price: TimeSeries,
    /// Flat £/kWh paid for exports.
    pub export_price: f64,
    /// gCO2/kWh per step.
    pub carbon_intensity: TimeSeries,
    /// £ per gCO2 applied to imports in the optimisation objective.
    pub carbon_weight: f64,
}

impl Tariff {
    pub fn validate(&self) -> Result<()> {
        self.import_price
            .check_aligned(&self.carbon_intensity, "tariff carbon intensity")?;
        if self.import_price.dense()?.iter().any(|p| *p < 0.0)
            || self.export_price < 0.0
            || self.carbon_weight < 0.0
        {
            return Err(Error::InvalidInput("tariff prices must be non-negative".into()));
        }
        Ok(())
    }

    /// £ charged for one step's import/export pair, including the carbon
    /// weighting on imports.
    pub(crate) fn step_cost(&self, t: usize, import_kwh: f64, export_kwh: f64) -> f64 {
        (self.import_price.value(t) + self.carbon_weight * self.carbon_intensity.value(t))
            * import_kwh
            - self.export_price * export_kwh
    }
}

/// Per-step dispatch decisions (kWh) with the end-of-step state of charge
/// and cost/carbon/cycle totals.
#[derive(Debug, Clone)]
pub struct DispatchResult {
    pub charge: TimeSeries,
    pub discharge: TimeSeries,
    pub import: TimeSeries,
    pub export: TimeSeries,
    /// %, end of step.
    pub soc: TimeSeries,
    /// Net tariff cost, £ (carbon weighting included when configured).
    pub cost: f64,
    /// Imported-energy emissions, gCO2.
    pub carbon: f64,
    /// Equivalent full cycles used.
    pub cycles: f64,
}

impl DispatchResult {
    pub(crate) fn assemble(
        timeline: &TimeSeries,
        tariff: &Tariff,
        spec: &BatterySpec,
        charge: Vec<f64>,
        discharge: Vec<f64>,
        import: Vec<f64>,
        export: Vec<f64>,
        soc: Vec<f64>,
    ) -> Result<Self> {
        let mut cost = 0.0;
        let mut carbon = 0.0;
        let mut throughput = 0.0;
        for t in 0..charge.len() {
            cost += tariff.step_cost(t, import[t], export[t]);
            carbon += tariff.carbon_intensity.value(t) * import[t];
            throughput += charge[t] + discharge[t];
        }
        Ok(Self {
            charge: timeline.with_values(charge)?.with_unit("kWh"),
            discharge: timeline.with_values(discharge)?.with_unit("kWh"),
            import: timeline.with_values(import)?.with_unit("kWh"),
            export: timeline.with_values(export)?.with_unit("kWh"),
            soc: timeline.with_values(soc)?.with_unit("%"),
            cost,
            carbon,
            cycles: throughput / (2.0 * spec.e_cap),
        })
    }
}
