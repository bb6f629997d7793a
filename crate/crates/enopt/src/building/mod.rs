//! Grey-box building thermal twin and model-predictive HVAC optimisation.
//!
//! A first-order lumped RC network models the zone: internal temperature
//! relaxes toward outdoor temperature through a resistance `R`, stores heat
//! in a capacitance `C`, and gains from HVAC power and solar irradiance
//! scaled by `p`. Parameters are fitted from history, a scalar Kalman
//! filter tracks the state online, and the optimiser trades off cost,
//! carbon, and comfort over a horizon.

mod kalman;
mod mpc;
mod pareto;
mod rc;

pub use kalman::{kalman_estimate, kalman_update, KalmanTrace, NoiseSpec};
pub use mpc::{optimise_horizon, rolling_mpc, MpcConfig};
pub use pareto::{default_weight_grid, non_dominated, pareto_sweep, ParetoPoint, ParetoSweep};
pub use rc::{fit_parameters, rc_step, simulate, thermostat_policy, FitHistory};

use crate::series::TimeSeries;
use crate::{Error, Result};

/// Model order tag; only the first-order (1R1C) network is implemented,
/// the tag leaves room for richer networks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ModelOrder {
    #[default]
    FirstOrder,
}

/// Fitted thermal parameters of one building zone.
#[derive(Debug, Clone, Copy)]
pub struct RcModelParams {
    /// Thermal resistance, °C per kW.
    pub resistance: f64,
    /// Thermal capacitance, kWh per °C.
    pub capacitance: f64,
    /// Solar gain factor, kW per (W/m²).
    pub solar_gain: f64,
    pub order: ModelOrder,
}

impl RcModelParams {
    pub fn new(resistance: f64, capacitance: f64, solar_gain: f64) -> Self {
        Self {
            resistance,
            capacitance,
            solar_gain,
            order: ModelOrder::FirstOrder,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.resistance > 0.0) || !(self.capacitance > 0.0) {
            return Err(Error::InvalidInput(
                "thermal resistance and capacitance must be positive".into(),
            ));
        }
        if !(self.solar_gain >= 0.0) {
            return Err(Error::InvalidInput(
                "solar gain factor must be non-negative".into(),
            ));
        }
        Ok(())
    }
}

/// Optional cooling plant: a second non-negative decision stream with its
/// own conversion factor and, if set, its own price/carbon series.
#[derive(Debug, Clone)]
pub struct CoolingSpec {
    pub q_max: f64,
    pub cop: f64,
    pub energy_price: Option<TimeSeries>,
    pub carbon_intensity: Option<TimeSeries>,
}

/// HVAC capability: thermal power limit, conversion from thermal power to
/// primary energy, optional per-step availability mask, optional cooling.
#[derive(Debug, Clone)]
pub struct HvacSpec {
    /// Maximum heating power, kW thermal.
    pub q_max: f64,
    /// Primary energy drawn per unit of heat delivered: E = Q / cop_heat.
    pub cop_heat: f64,
    /// Per-step on/off mask; `None` means always available.
    pub allowed_hours: Option<Vec<bool>>,
    pub cooling: Option<CoolingSpec>,
}

impl HvacSpec {
    pub fn heating_only(q_max: f64, cop_heat: f64) -> Self {
        Self {
            q_max,
            cop_heat,
            allowed_hours: None,
            cooling: None,
        }
    }

    pub fn validate(&self, steps: usize) -> Result<()> {
        if !(self.q_max >= 0.0) {
            return Err(Error::InvalidInput("Q_max must be non-negative".into()));
        }
        if !(self.cop_heat > 0.0) {
            return Err(Error::InvalidInput("cop_heat must be positive".into()));
        }
        if let Some(mask) = &self.allowed_hours {
            if mask.len() != steps {
                return Err(Error::InvalidInput(format!(
                    "availability mask has {} steps, scenario has {steps}",
                    mask.len()
                )));
            }
        }
        if let Some(c) = &self.cooling {
            if !(c.q_max >= 0.0) || !(c.cop > 0.0) {
                return Err(Error::InvalidInput("invalid cooling spec".into()));
            }
        }
        Ok(())
    }

    /// Heating power ceiling at step `t`.
    pub fn max_heat_at(&self, t: usize) -> f64 {
        match &self.allowed_hours {
            Some(mask) if !mask[t] => 0.0,
            _ => self.q_max,
        }
    }

    pub fn max_cool_at(&self, t: usize) -> f64 {
        let Some(c) = &self.cooling else { return 0.0 };
        match &self.allowed_hours {
            Some(mask) if !mask[t] => 0.0,
            _ => c.q_max,
        }
    }
}

/// Comfort definition: target temperature, occupancy mask, and the band
/// half-width that counts as comfortable.
#[derive(Debug, Clone)]
pub struct ComfortSpec {
    pub target: TimeSeries,
    pub occupied: Vec<bool>,
    /// Comfort half-width in °C.
    pub band: f64,
}

impl ComfortSpec {
    pub fn new(target: TimeSeries, occupied: Vec<bool>) -> Self {
        Self {
            target,
            occupied,
            band: 1.0,
        }
    }

    pub fn with_band(mut self, band: f64) -> Self {
        self.band = band;
        self
    }

    pub fn validate(&self, steps: usize) -> Result<()> {
        if !(self.band > 0.0) {
            return Err(Error::InvalidInput("comfort band must be positive".into()));
        }
        if self.target.len() != steps || self.occupied.len() != steps {
            return Err(Error::InvalidInput(format!(
                "comfort spec covers {} target / {} occupancy steps, scenario has {steps}",
                self.target.len(),
                self.occupied.len()
            )));
        }
        Ok(())
    }
}

/// Relative importance of cost, carbon, and comfort deviation in the
/// optimiser objective.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectiveWeights {
    pub cost: f64,
    pub carbon: f64,
    pub comfort: f64,
}

impl ObjectiveWeights {
    pub fn new(cost: f64, carbon: f64, comfort: f64) -> Self {
        Self {
            cost,
            carbon,
            comfort,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.cost < 0.0 || self.carbon < 0.0 || self.comfort < 0.0 {
            return Err(Error::InvalidInput("weights must be non-negative".into()));
        }
        if self.cost == 0.0 && self.carbon == 0.0 && self.comfort == 0.0 {
            return Err(Error::InvalidInput("at least one weight must be positive".into()));
        }
        Ok(())
    }
}

/// Exogenous drivers of one scenario, aligned step for step.
#[derive(Debug, Clone)]
pub struct ScenarioInputs {
    /// Outdoor temperature, °C.
    pub outdoor_temp: TimeSeries,
    /// Solar irradiance, W/m².
    pub irradiance: TimeSeries,
    /// Energy price, £/kWh.
    pub energy_price: TimeSeries,
    /// Grid carbon intensity, gCO2/kWh.
    pub carbon_intensity: TimeSeries,
}

impl ScenarioInputs {
    pub fn validate(&self) -> Result<()> {
        self.outdoor_temp
            .check_aligned(&self.irradiance, "scenario irradiance")?;
        self.outdoor_temp
            .check_aligned(&self.energy_price, "scenario energy price")?;
        self.outdoor_temp
            .check_aligned(&self.carbon_intensity, "scenario carbon intensity")?;
        self.outdoor_temp.dense()?;
        self.irradiance.dense()?;
        self.energy_price.dense()?;
        self.carbon_intensity.dense()?;
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.outdoor_temp.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outdoor_temp.is_empty()
    }

    pub fn dt_hours(&self) -> f64 {
        self.outdoor_temp.resolution_hours()
    }

    pub fn slice(&self, from: usize, len: usize) -> Result<Self> {
        Ok(Self {
            outdoor_temp: self.outdoor_temp.slice(from, len)?,
            irradiance: self.irradiance.slice(from, len)?,
            energy_price: self.energy_price.slice(from, len)?,
            carbon_intensity: self.carbon_intensity.slice(from, len)?,
        })
    }
}

/// One step's HVAC command: non-negative heating and cooling thermal power.
#[derive(Debug, Clone, Copy, Default)]
pub struct HvacAction {
    pub heat: f64,
    pub cool: f64,
}

impl HvacAction {
    pub fn heat(q: f64) -> Self {
        Self { heat: q, cool: 0.0 }
    }

    pub fn off() -> Self {
        Self::default()
    }
}

/// Dispatch trajectory of one building run with its cost, carbon, and
/// comfort outcome. Temperatures are end-of-step values.
#[derive(Debug, Clone)]
pub struct BuildingSchedule {
    pub heating: TimeSeries,
    pub cooling: TimeSeries,
    pub indoor_temp: TimeSeries,
    pub initial_temp: f64,
    /// Real energy cost, £.
    pub cost: f64,
    /// Emissions, gCO2.
    pub carbon: f64,
    /// Primary energy drawn, kWh.
    pub energy: f64,
    /// Fraction of occupied steps with the indoor temperature within the
    /// comfort band of target.
    pub comfort_criterion: f64,
}
