//! RC dynamics, open-loop simulation, and parameter fitting.

use super::{
    BuildingSchedule, ComfortSpec, HvacAction, HvacSpec, RcModelParams, ScenarioInputs,
};
use crate::series::{score_values, AccuracyReport, TimeSeries};
use crate::{Error, Result};

/// One discrete step of the zone temperature:
///
/// `T_next = T + (dt/C) * ((T_out - T)/R + Q + p * I)`
///
/// with `Q` the net thermal power into the zone (heating positive, cooling
/// negative) in kW, `I` the solar irradiance in W/m², and `dt` in hours.
pub fn rc_step(
    indoor_temp: f64,
    outdoor_temp: f64,
    q_hvac: f64,
    irradiance: f64,
    params: &RcModelParams,
    dt_hours: f64,
) -> Result<f64> {
    params.validate()?;
    if !indoor_temp.is_finite()
        || !outdoor_temp.is_finite()
        || !q_hvac.is_finite()
        || !irradiance.is_finite()
        || !dt_hours.is_finite()
        || dt_hours <= 0.0
    {
        return Err(Error::InvalidInput("non-finite input to rc_step".into()));
    }
    Ok(indoor_temp
        + dt_hours / params.capacitance
            * ((outdoor_temp - indoor_temp) / params.resistance
                + q_hvac
                + params.solar_gain * irradiance))
}

/// Runs a control policy through the RC model, accumulating real cost and
/// carbon from the scenario's price and intensity streams. The policy sees
/// the step index and the current indoor temperature; its output must
/// respect the HVAC limits (out-of-bounds commands are an error, never
/// clamped).
pub fn simulate(
    params: &RcModelParams,
    mut policy: impl FnMut(usize, f64) -> HvacAction,
    hvac: &HvacSpec,
    comfort: &ComfortSpec,
    inputs: &ScenarioInputs,
    initial_temp: f64,
) -> Result<BuildingSchedule> {
    params.validate()?;
    inputs.validate()?;
    let steps = inputs.len();
    hvac.validate(steps)?;
    comfort.validate(steps)?;
    if !initial_temp.is_finite() {
        return Err(Error::InvalidInput("initial temperature must be finite".into()));
    }
    let dt = inputs.dt_hours();

    let mut heat = Vec::with_capacity(steps);
    let mut cool = Vec::with_capacity(steps);
    let mut temps = Vec::with_capacity(steps);
    let mut cost = 0.0;
    let mut carbon = 0.0;
    let mut energy = 0.0;
    let mut occupied_steps = 0usize;
    let mut comfortable_steps = 0usize;

    let mut t_i = initial_temp;
    for t in 0..steps {
        let action = policy(t, t_i);
        let max_heat = hvac.max_heat_at(t);
        let max_cool = hvac.max_cool_at(t);
        if action.heat < -1e-12 || action.heat > max_heat + 1e-9 {
            return Err(Error::InvalidInput(format!(
                "policy heating {} kW outside [0, {max_heat}] at step {t}",
                action.heat
            )));
        }
        if action.cool < -1e-12 || action.cool > max_cool + 1e-9 {
            return Err(Error::InvalidInput(format!(
                "policy cooling {} kW outside [0, {max_cool}] at step {t}",
                action.cool
            )));
        }

        let e_heat = action.heat / hvac.cop_heat;
        let mut e_cool = 0.0;
        let mut price_cool = 0.0;
        let mut carbon_cool = 0.0;
        if let Some(c) = &hvac.cooling {
            e_cool = action.cool / c.cop;
            price_cool = c
                .energy_price
                .as_ref()
                .map(|s| s.value(t))
                .unwrap_or_else(|| inputs.energy_price.value(t));
            carbon_cool = c
                .carbon_intensity
                .as_ref()
                .map(|s| s.value(t))
                .unwrap_or_else(|| inputs.carbon_intensity.value(t));
        }
        cost += inputs.energy_price.value(t) * e_heat * dt + price_cool * e_cool * dt;
        carbon += inputs.carbon_intensity.value(t) * e_heat * dt + carbon_cool * e_cool * dt;
        energy += (e_heat + e_cool) * dt;

        t_i = rc_step(
            t_i,
            inputs.outdoor_temp.value(t),
            action.heat - action.cool,
            inputs.irradiance.value(t),
            params,
            dt,
        )?;

        if comfort.occupied[t] {
            occupied_steps += 1;
            if (t_i - comfort.target.value(t)).abs() <= comfort.band {
                comfortable_steps += 1;
            }
        }
        heat.push(action.heat);
        cool.push(action.cool);
        temps.push(t_i);
    }

    let comfort_criterion = if occupied_steps == 0 {
        1.0
    } else {
        comfortable_steps as f64 / occupied_steps as f64
    };
    let timeline = &inputs.outdoor_temp;
    Ok(BuildingSchedule {
        heating: timeline.with_values(heat)?.with_unit("kW"),
        cooling: timeline.with_values(cool)?.with_unit("kW"),
        indoor_temp: timeline.with_values(temps)?.with_unit("°C"),
        initial_temp,
        cost,
        carbon,
        energy,
        comfort_criterion,
    })
}

/// A legacy bang-bang controller: during occupied steps (plus a warm-up
/// lead-in) heat at full power below `target - deadband`, switch off above
/// `target + deadband`, and hold the previous command in between.
pub fn thermostat_policy<'a>(
    comfort: &'a ComfortSpec,
    hvac: &'a HvacSpec,
    warmup_steps: usize,
    deadband: f64,
) -> impl FnMut(usize, f64) -> HvacAction + 'a {
    let mut heating_on = false;
    move |t: usize, t_i: f64| {
        let enabled = comfort.occupied[t]
            || comfort.occupied[(t + 1)..comfort.occupied.len().min(t + 1 + warmup_steps)]
                .iter()
                .any(|o| *o);
        if !enabled {
            heating_on = false;
            return HvacAction::off();
        }
        let target = comfort.target.value(t);
        if t_i < target - deadband {
            heating_on = true;
        } else if t_i > target + deadband {
            heating_on = false;
        }
        if heating_on {
            HvacAction::heat(hvac.max_heat_at(t))
        } else {
            HvacAction::off()
        }
    }
}

/// Aligned historical observations for parameter fitting.
#[derive(Debug, Clone)]
pub struct FitHistory {
    /// Observed indoor temperature, °C.
    pub indoor_temp: TimeSeries,
    /// Outdoor temperature, °C.
    pub outdoor_temp: TimeSeries,
    /// Solar irradiance, W/m².
    pub irradiance: TimeSeries,
    /// Net HVAC thermal power applied, kW.
    pub q_hvac: TimeSeries,
}

impl FitHistory {
    fn validate(&self) -> Result<()> {
        self.indoor_temp
            .check_aligned(&self.outdoor_temp, "fit outdoor temperature")?;
        self.indoor_temp
            .check_aligned(&self.irradiance, "fit irradiance")?;
        self.indoor_temp.check_aligned(&self.q_hvac, "fit HVAC power")?;
        Ok(())
    }
}

const MIN_FIT_STEPS: usize = 48;

/// Fits `(R, C, p)` by minimising the one-step-ahead squared prediction
/// error of [`rc_step`] on observed data: coordinate-wise golden-section
/// search over `log10 R` and `log10 C`, with the solar gain `p` solved in
/// closed form (non-negative least squares) at every candidate. Returns the
/// parameters and the in-sample one-step accuracy.
pub fn fit_parameters(history: &FitHistory) -> Result<(RcModelParams, AccuracyReport)> {
    history.validate()?;
    let t_i = history.indoor_temp.dense()?;
    let t_e = history.outdoor_temp.dense()?;
    let irr = history.irradiance.dense()?;
    let q = history.q_hvac.dense()?;
    let n = t_i.len();
    if n < MIN_FIT_STEPS {
        return Err(Error::InvalidInput(format!(
            "need at least {MIN_FIT_STEPS} aligned steps to fit, got {n}"
        )));
    }
    let mean = t_i.iter().sum::<f64>() / n as f64;
    let variance = t_i.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
    if variance <= 1e-12 {
        return Err(Error::Unidentifiable(
            "indoor temperature has no variance; the data cannot identify R, C, p".into(),
        ));
    }
    let dt = history.indoor_temp.resolution_hours();

    // SSE of one-step predictions for (R, C), with p profiled out.
    let sse_and_p = |log_r: f64, log_c: f64| -> (f64, f64) {
        let r = 10f64.powf(log_r);
        let c = 10f64.powf(log_c);
        let b = dt / c;
        // Residual without solar: y_k = T_{k+1} - T_k - b*((Te-T)/R + Q);
        // regressor a_k = b * I_k; p = max(0, <y,a>/<a,a>).
        let mut ya = 0.0;
        let mut aa = 0.0;
        for k in 0..n - 1 {
            let base = b * ((t_e[k] - t_i[k]) / r + q[k]);
            let y = t_i[k + 1] - t_i[k] - base;
            let a = b * irr[k];
            ya += y * a;
            aa += a * a;
        }
        let p = if aa > 0.0 { (ya / aa).max(0.0) } else { 0.0 };
        let mut sse = 0.0;
        for k in 0..n - 1 {
            let pred = t_i[k] + b * ((t_e[k] - t_i[k]) / r + q[k] + p * irr[k]);
            let e = t_i[k + 1] - pred;
            sse += e * e;
        }
        (sse, p)
    };

    const LOG_R: (f64, f64) = (-2.0, 2.0);
    const LOG_C: (f64, f64) = (-2.0, 3.0);
    let mut log_r = 0.0;
    let mut log_c = 0.0;
    let mut best = f64::INFINITY;
    for sweep in 0..200 {
        let prev = (log_r, log_c);
        log_r = golden_min(LOG_R.0, LOG_R.1, 1e-10, |x| sse_and_p(x, log_c).0);
        log_c = golden_min(LOG_C.0, LOG_C.1, 1e-10, |x| sse_and_p(log_r, x).0);
        let sse = sse_and_p(log_r, log_c).0;
        let moved = (log_r - prev.0).abs().max((log_c - prev.1).abs());
        if sweep > 0 && moved < 1e-9 && (best - sse).abs() <= 1e-14 * (1.0 + best) {
            break;
        }
        best = sse;
    }

    let (_, p) = sse_and_p(log_r, log_c);
    let params = RcModelParams::new(10f64.powf(log_r), 10f64.powf(log_c), p);

    // In-sample one-step accuracy.
    let mut preds = Vec::with_capacity(n - 1);
    for k in 0..n - 1 {
        preds.push(rc_step(t_i[k], t_e[k], q[k], irr[k], &params, dt)?);
    }
    let report = score_values(&t_i[1..], &preds)?;
    Ok((params, report))
}

/// Golden-section minimisation of a unimodal-enough function on [a, b].
fn golden_min(a: f64, b: f64, tol: f64, f: impl Fn(f64) -> f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (mut a, mut b) = (a, b);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use chrono::Duration;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::series::t0;

    fn series(values: Vec<f64>, unit: &str) -> TimeSeries {
        TimeSeries::new(t0(), Duration::minutes(30), values, unit).unwrap()
    }

    fn params() -> RcModelParams {
        RcModelParams::new(2.0, 1.0, 0.0)
    }

    #[test]
    fn equilibrium_is_a_fixed_point() {
        let p = RcModelParams::new(3.0, 2.0, 0.1);
        let next = rc_step(15.0, 15.0, 0.0, 0.0, &p, 0.5).unwrap();
        assert_eq!(next, 15.0);
    }

    #[test]
    fn loss_exactly_offset_by_heating() {
        // dT = (0.5/1) * ((10-20)/2 + 5) = 0.
        let next = rc_step(20.0, 10.0, 5.0, 0.0, &params(), 0.5).unwrap();
        assert!((next - 20.0).abs() < 1e-12);
        // Two extra kW add 0.5 * 2 = 1 degree.
        let warmer = rc_step(20.0, 10.0, 7.0, 0.0, &params(), 0.5).unwrap();
        assert!((warmer - 21.0).abs() < 1e-12);
    }

    #[test]
    fn non_finite_inputs_rejected() {
        assert!(rc_step(f64::NAN, 10.0, 0.0, 0.0, &params(), 0.5).is_err());
        assert!(rc_step(20.0, 10.0, f64::INFINITY, 0.0, &params(), 0.5).is_err());
    }

    #[test]
    fn superposition_holds() {
        // The step is affine in (T_i, T_e, Q, I): response to a sum of
        // perturbations equals the sum of responses.
        let p = RcModelParams::new(1.7, 2.3, 0.05);
        let dt = 0.5;
        let base = rc_step(18.0, 5.0, 2.0, 100.0, &p, dt).unwrap();
        let d_ti = rc_step(19.0, 5.0, 2.0, 100.0, &p, dt).unwrap() - base;
        let d_te = rc_step(18.0, 6.0, 2.0, 100.0, &p, dt).unwrap() - base;
        let d_q = rc_step(18.0, 5.0, 3.0, 100.0, &p, dt).unwrap() - base;
        let d_i = rc_step(18.0, 5.0, 2.0, 150.0, &p, dt).unwrap() - base;
        let all = rc_step(19.0, 6.0, 3.0, 150.0, &p, dt).unwrap();
        assert!((all - (base + d_ti + d_te + d_q + d_i)).abs() < 1e-12);
    }

    fn flat_inputs(steps: usize, t_e: f64, price: f64) -> ScenarioInputs {
        ScenarioInputs {
            outdoor_temp: series(vec![t_e; steps], "°C"),
            irradiance: series(vec![0.0; steps], "W/m²"),
            energy_price: series(vec![price; steps], "£/kWh"),
            carbon_intensity: series(vec![200.0; steps], "gCO2/kWh"),
        }
    }

    fn comfort(steps: usize, target: f64) -> ComfortSpec {
        ComfortSpec::new(series(vec![target; steps], "°C"), vec![true; steps])
    }

    #[test]
    fn free_drift_converges_geometrically() {
        let p = RcModelParams::new(2.0, 1.0, 0.0);
        let inputs = flat_inputs(96, 10.0, 0.1);
        let hvac = HvacSpec::heating_only(5.0, 1.0);
        let sched = simulate(&p, |_, _| HvacAction::off(), &hvac, &comfort(96, 20.0), &inputs, 20.0)
            .unwrap();
        // Closed form: T_k - T_e = (T_0 - T_e) * a^k with a = 1 - dt/(RC).
        let a: f64 = 1.0 - 0.5 / 2.0;
        for k in 0..96 {
            let expected = 10.0 + 10.0 * a.powi(k as i32 + 1);
            assert!(
                (sched.indoor_temp.value(k) - expected).abs() < 1e-9,
                "step {k}"
            );
        }
        assert_eq!(sched.cost, 0.0);
    }

    #[test]
    fn zero_price_means_zero_cost() {
        let p = params();
        let inputs = flat_inputs(48, 0.0, 0.0);
        let hvac = HvacSpec::heating_only(5.0, 0.9);
        let sched = simulate(
            &p,
            |_, _| HvacAction::heat(5.0),
            &hvac,
            &comfort(48, 20.0),
            &inputs,
            15.0,
        )
        .unwrap();
        assert_eq!(sched.cost, 0.0);
        assert!(sched.energy > 0.0);
    }

    #[test]
    fn out_of_bounds_policy_is_an_error() {
        let p = params();
        let inputs = flat_inputs(4, 10.0, 0.1);
        let hvac = HvacSpec::heating_only(5.0, 1.0);
        assert!(simulate(
            &p,
            |_, _| HvacAction::heat(6.0),
            &hvac,
            &comfort(4, 20.0),
            &inputs,
            15.0
        )
        .is_err());
    }

    #[test]
    fn thermostat_holds_deadband_after_warmup() {
        // Heavy zone with plenty of capacity: equilibrium at full power is
        // T_e + R * Q_max = 24 °C, comfortably above the 20 °C target.
        let p = RcModelParams::new(2.0, 4.0, 0.0);
        let inputs = flat_inputs(192, 0.0, 0.1);
        let comfort = comfort(192, 20.0);
        let hvac = HvacSpec::heating_only(12.0, 1.0);
        let policy = thermostat_policy(&comfort, &hvac, 0, 0.5);
        let sched = simulate(&p, policy, &hvac, &comfort, &inputs, 14.0).unwrap();
        // Hand-traced climb: T_k = 24 - 10 * 0.9375^k crosses 19.5 at
        // k = ceil(ln(0.45)/ln(0.9375)) = 13, i.e. index 12 of the
        // end-of-step trace; after that one off-step drops at most ~1.3 °C.
        let warmed = sched
            .indoor_temp
            .values()
            .iter()
            .position(|t| *t >= 19.5)
            .expect("never warmed up");
        assert_eq!(warmed, 12);
        for k in warmed..192 {
            let t = sched.indoor_temp.value(k);
            assert!(t > 18.0 && t < 22.0, "step {k}: {t}");
        }
        assert!(sched.comfort_criterion > 0.9);
    }

    fn synthetic_history(
        true_params: &RcModelParams,
        steps: usize,
        noise_std: f64,
        seed: u64,
    ) -> FitHistory {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dt = 0.5;
        let mut t_e = Vec::with_capacity(steps);
        let mut irr = Vec::with_capacity(steps);
        let mut q = Vec::with_capacity(steps);
        for k in 0..steps {
            let hour = (k as f64 * dt) % 24.0;
            t_e.push(5.0 + 5.0 * ((hour - 14.0) / 24.0 * std::f64::consts::TAU).cos());
            irr.push(if (8.0..16.0).contains(&hour) {
                400.0 * ((hour - 8.0) / 8.0 * std::f64::consts::PI).sin()
            } else {
                0.0
            });
            // Pseudo-random heating keeps the input informative.
            q.push(if rng.gen_bool(0.5) { 6.0 } else { 0.0 });
        }
        let mut t_true = vec![18.0];
        for k in 0..steps - 1 {
            t_true.push(
                rc_step(t_true[k], t_e[k], q[k], irr[k], true_params, dt).unwrap(),
            );
        }
        let observed: Vec<f64> = t_true
            .iter()
            .map(|t| {
                t + noise_std
                    * rng.sample::<f64, _>(rand_distr::StandardNormal)
            })
            .collect();
        FitHistory {
            indoor_temp: series(observed, "°C"),
            outdoor_temp: series(t_e, "°C"),
            irradiance: series(irr, "W/m²"),
            q_hvac: series(q, "kW"),
        }
    }

    #[test]
    fn noiseless_recovery_is_sharp() {
        let truth = RcModelParams::new(2.0, 1.5, 0.1);
        let history = synthetic_history(&truth, 672, 0.0, 42);
        let (fit, report) = fit_parameters(&history).unwrap();
        assert!((fit.resistance - 2.0).abs() / 2.0 < 1e-3, "R = {}", fit.resistance);
        assert!((fit.capacitance - 1.5).abs() / 1.5 < 1e-3, "C = {}", fit.capacitance);
        assert!((fit.solar_gain - 0.1).abs() / 0.1 < 1e-3, "p = {}", fit.solar_gain);
        assert!(report.mae < 1e-6);
    }

    #[test]
    fn constant_data_is_unidentifiable() {
        let history = FitHistory {
            indoor_temp: series(vec![20.0; 96], "°C"),
            outdoor_temp: series(vec![20.0; 96], "°C"),
            irradiance: series(vec![0.0; 96], "W/m²"),
            q_hvac: series(vec![0.0; 96], "kW"),
        };
        assert!(matches!(
            fit_parameters(&history),
            Err(Error::Unidentifiable(_))
        ));
    }
}
