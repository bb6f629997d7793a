//! Scalar Kalman filtering of the zone temperature.
//!
//! The first-order RC model gives a linear-Gaussian state equation
//! `T_{k+1} = a T_k + b_k` with `a = 1 - dt/(RC)` and `b_k` collecting the
//! known inputs, so the standard predict/update recursion applies directly
//! to the scalar state.

use super::{rc_step, RcModelParams, ScenarioInputs};
use crate::series::TimeSeries;
use crate::{Error, Result};

/// Process and measurement noise variances. Measurement variance may be
/// zero (a perfect sensor: the update then returns the measurement).
#[derive(Debug, Clone, Copy)]
pub struct NoiseSpec {
    pub process_var: f64,
    pub measurement_var: f64,
}

impl NoiseSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.process_var > 0.0) {
            return Err(Error::InvalidInput(
                "process noise variance must be positive".into(),
            ));
        }
        if !(self.measurement_var >= 0.0) {
            return Err(Error::InvalidInput(
                "measurement noise variance must be non-negative".into(),
            ));
        }
        Ok(())
    }
}

/// Filtered means and variances, one per measurement index.
#[derive(Debug, Clone)]
pub struct KalmanTrace {
    pub mean: Vec<f64>,
    pub variance: Vec<f64>,
}

/// One Bayes update of a scalar Gaussian state with measurement `z` of
/// variance `r`: gain `K = v/(v+r)`, posterior `m + K (z - m)`, `(1-K) v`.
pub fn kalman_update(mean: f64, variance: f64, z: f64, r: f64) -> Result<(f64, f64)> {
    if !(variance > 0.0) || r < 0.0 {
        return Err(Error::InvalidInput(
            "prior variance must be positive and measurement variance non-negative".into(),
        ));
    }
    let gain = variance / (variance + r);
    Ok((mean + gain * (z - mean), (1.0 - gain) * variance))
}

/// Filters a series of noisy indoor-temperature measurements given the
/// applied HVAC power and the scenario inputs. `NaN` measurements give a
/// predict-only step, so the variance grows until the next observation.
/// `measurements[0]` is an observation of the state one step after
/// `initial`.
pub fn kalman_estimate(
    params: &RcModelParams,
    measurements: &TimeSeries,
    applied_q: &[f64],
    inputs: &ScenarioInputs,
    noise: NoiseSpec,
    initial: (f64, f64),
) -> Result<KalmanTrace> {
    params.validate()?;
    noise.validate()?;
    inputs.validate()?;
    measurements.check_aligned(&inputs.outdoor_temp, "kalman measurements")?;
    if applied_q.len() != measurements.len() {
        return Err(Error::InvalidInput(format!(
            "{} HVAC values for {} measurements",
            applied_q.len(),
            measurements.len()
        )));
    }
    let (mut mean, mut variance) = initial;
    if !(variance > 0.0) {
        return Err(Error::InvalidInput("initial variance must be positive".into()));
    }
    let dt = inputs.dt_hours();
    let a = 1.0 - dt / (params.resistance * params.capacitance);

    let mut trace = KalmanTrace {
        mean: Vec::with_capacity(measurements.len()),
        variance: Vec::with_capacity(measurements.len()),
    };
    for k in 0..measurements.len() {
        // Predict through the RC dynamics.
        mean = rc_step(
            mean,
            inputs.outdoor_temp.value(k),
            applied_q[k],
            inputs.irradiance.value(k),
            params,
            dt,
        )?;
        variance = a * a * variance + noise.process_var;

        let z = measurements.value(k);
        if !z.is_nan() {
            let (m, v) = kalman_update(mean, variance, z, noise.measurement_var)?;
            mean = m;
            variance = v;
        }
        trace.mean.push(mean);
        trace.variance.push(variance);
    }
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use chrono::Duration;

    use super::*;
    use crate::series::t0;

    fn series(values: Vec<f64>, unit: &str) -> TimeSeries {
        TimeSeries::new(t0(), Duration::minutes(30), values, unit).unwrap()
    }

    fn inputs(steps: usize) -> ScenarioInputs {
        ScenarioInputs {
            outdoor_temp: series(vec![10.0; steps], "°C"),
            irradiance: series(vec![0.0; steps], "W/m²"),
            energy_price: series(vec![0.1; steps], "£/kWh"),
            carbon_intensity: series(vec![100.0; steps], "gCO2/kWh"),
        }
    }

    #[test]
    fn scalar_bayes_update() {
        let (m, v) = kalman_update(20.0, 1.0, 22.0, 1.0).unwrap();
        assert!((m - 21.0).abs() < 1e-12);
        assert!((v - 0.5).abs() < 1e-12);
    }

    #[test]
    fn perfect_sensor_pins_the_state() {
        let (m, v) = kalman_update(20.0, 1.0, 22.0, 0.0).unwrap();
        assert_eq!(m, 22.0);
        assert_eq!(v, 0.0);
    }

    #[test]
    fn bad_variances_rejected() {
        assert!(kalman_update(20.0, 0.0, 22.0, 1.0).is_err());
        assert!(NoiseSpec {
            process_var: 0.0,
            measurement_var: 1.0
        }
        .validate()
        .is_err());
        assert!(NoiseSpec {
            process_var: 1.0,
            measurement_var: -1.0
        }
        .validate()
        .is_err());
    }

    #[test]
    fn missing_measurements_grow_variance() {
        let params = RcModelParams::new(2.0, 1.5, 0.0);
        let noise = NoiseSpec {
            process_var: 0.05,
            measurement_var: 0.1,
        };
        let measurements = series(vec![18.0, f64::NAN, f64::NAN, 18.5], "°C");
        let trace = kalman_estimate(
            &params,
            &measurements,
            &[0.0; 4],
            &inputs(4),
            noise,
            (19.0, 1.0),
        )
        .unwrap();
        // Predict-only steps strictly grow the variance, the next update
        // shrinks it back.
        assert!(trace.variance[1] > trace.variance[0]);
        assert!(trace.variance[2] > trace.variance[1]);
        assert!(trace.variance[3] < trace.variance[2]);
        // The missing steps propagate the state through the dynamics.
        let expected = rc_step(trace.mean[0], 10.0, 0.0, 0.0, &params, 0.5).unwrap();
        assert!((trace.mean[1] - expected).abs() < 1e-12);
    }

    #[test]
    fn update_shrinks_predict_grows() {
        // Slow zone (RC = 24 h at dt = 0.5 h): once an update has pulled the
        // variance below r, every predict step strictly grows it because
        // the process noise outweighs the mild dynamic contraction.
        let params = RcModelParams::new(8.0, 3.0, 0.0);
        let noise = NoiseSpec {
            process_var: 0.02,
            measurement_var: 0.2,
        };
        let n = 48;
        let meas: Vec<f64> = (0..n).map(|k| 16.0 + (k as f64 * 0.3).sin()).collect();
        let a = 1.0 - 0.5 / (8.0 * 3.0);
        let (mut mean, mut variance) = (16.0, 1.0);
        let dt = 0.5;
        for (k, &z) in meas.iter().enumerate() {
            let predicted_var = a * a * variance + noise.process_var;
            if k > 0 {
                assert!(
                    predicted_var >= variance - 1e-15,
                    "predict shrank the variance at step {k}"
                );
            }
            mean = rc_step(mean, 10.0, 0.0, 0.0, &params, dt).unwrap();
            variance = predicted_var;
            let (m, v) = kalman_update(mean, variance, z, noise.measurement_var).unwrap();
            assert!(v <= variance + 1e-15, "update must not grow variance");
            mean = m;
            variance = v;
        }
    }
}
