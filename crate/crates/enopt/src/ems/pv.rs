//! Solar PV generation twin.

use super::PvSpec;
use crate::series::TimeSeries;
use crate::Result;

/// Simulates PV energy per step (kWh):
///
/// `E = dc_rating * (I / I_rated) * eff * derate(T) * dt`, capped at the
/// nameplate energy `dc_rating * dt`, where `derate(T) = max(0, 1 -
/// derate_coeff * max(0, T - ref_temp))`. Output is forced to exactly zero
/// whenever irradiance is zero or negative, so night steps never report
/// spurious generation.
pub fn simulate_pv(
    irradiance: &TimeSeries,
    ambient_temp: &TimeSeries,
    spec: &PvSpec,
) -> Result<TimeSeries> {
    spec.validate()?;
    irradiance.check_aligned(ambient_temp, "PV ambient temperature")?;
    let irr = irradiance.dense()?;
    let temp = ambient_temp.dense()?;
    let dt = irradiance.resolution_hours();
    let cap = spec.dc_rating * dt;

    let values: Vec<f64> = irr
        .iter()
        .zip(temp)
        .map(|(&i, &t)| {
            if i <= 0.0 {
                return 0.0;
            }
            let derate = (1.0 - spec.derate_coeff * (t - spec.ref_temp).max(0.0)).max(0.0);
            let e = spec.dc_rating * (i / spec.irradiance_at_rating)
                * spec.system_efficiency
                * derate
                * dt;
            e.min(cap)
        })
        .collect();
    Ok(irradiance.with_values(values)?.with_unit("kWh"))
}
