//! Battery state-of-charge twin.

use super::BatterySpec;
use crate::{Error, Result};

/// Advances the state of charge by one interval:
///
/// `SOC' = SOC + (eta_c * charge - discharge / eta_d) * 100 / e_cap`
///
/// `charge` and `discharge` are energies in kWh for the interval, each
/// limited by `p_max * dt`. A step that would leave the operating window
/// errors rather than clamping; a 1e-6 % grace absorbs float noise from
/// optimiser round-trips.
pub fn battery_step(
    soc: f64,
    charge_kwh: f64,
    discharge_kwh: f64,
    spec: &BatterySpec,
    dt_hours: f64,
) -> Result<f64> {
    spec.validate()?;
    if !(dt_hours > 0.0) {
        return Err(Error::InvalidInput("dt must be positive".into()));
    }
    if charge_kwh < 0.0 || discharge_kwh < 0.0 {
        return Err(Error::InvalidInput(
            "charge and discharge energies must be non-negative".into(),
        ));
    }
    let step_cap = spec.p_max * dt_hours;
    if charge_kwh > step_cap + 1e-9 || discharge_kwh > step_cap + 1e-9 {
        return Err(Error::InvalidInput(format!(
            "charge {charge_kwh} / discharge {discharge_kwh} kWh exceed the \
             per-interval limit {step_cap} kWh"
        )));
    }
    let next =
        soc + (spec.eta_c * charge_kwh - discharge_kwh / spec.eta_d) * 100.0 / spec.e_cap;
    const GRACE: f64 = 1e-6;
    if next < spec.soc_min - GRACE || next > spec.soc_max + GRACE {
        return Err(Error::InvalidInput(format!(
            "state of charge {next:.6}% escapes [{}, {}]",
            spec.soc_min, spec.soc_max
        )));
    }
    Ok(next.clamp(spec.soc_min, spec.soc_max))
}
