//! Horizon optimisation and the rolling (receding-horizon) loop.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use super::{
    kalman_update, rc_step, simulate, BuildingSchedule, ComfortSpec, HvacAction, HvacSpec,
    ObjectiveWeights, RcModelParams, ScenarioInputs,
};
use crate::milp::{solve_lp, LpProblem, Sense, SolveOptions, Status, VarId};
use crate::{Error, Result};

pub(crate) struct HorizonLayout {
    pub heat: Vec<VarId>,
    pub cool: Vec<VarId>,
    pub deviation: Vec<VarId>,
    pub temp: Vec<VarId>,
}

/// Builds the horizon LP: decisions are heating (and optional cooling)
/// power per step plus a deviation slack per step; the temperature chain is
/// enforced by per-step equality constraints and the objective mixes
/// weighted energy cost, weighted carbon, and weighted occupied-hours
/// deviation. The comfort term is linearised as `d >= |T - target|` via two
/// inequalities.
pub(crate) fn build_horizon_lp(
    params: &RcModelParams,
    hvac: &HvacSpec,
    comfort: &ComfortSpec,
    weights: &ObjectiveWeights,
    inputs: &ScenarioInputs,
    initial_temp: f64,
) -> Result<(LpProblem, HorizonLayout)> {
    let n = inputs.len();
    if n == 0 {
        return Err(Error::InvalidInput("empty horizon".into()));
    }
    let dt = inputs.dt_hours();
    let a = 1.0 - dt / (params.resistance * params.capacitance);
    let b = dt / params.capacitance;

    let mut lp = LpProblem::new(Sense::Minimize);
    let mut layout = HorizonLayout {
        heat: Vec::with_capacity(n),
        cool: Vec::with_capacity(n),
        deviation: Vec::with_capacity(n),
        temp: Vec::with_capacity(n),
    };

    for t in 0..n {
        let heat_cost = (weights.cost * inputs.energy_price.value(t)
            + weights.carbon * inputs.carbon_intensity.value(t))
            * dt
            / hvac.cop_heat;
        layout.heat.push(lp.add_var(
            format!("q_heat_{t}"),
            0.0,
            hvac.max_heat_at(t),
            heat_cost,
        ));
        if let Some(c) = &hvac.cooling {
            let price = c
                .energy_price
                .as_ref()
                .map(|s| s.value(t))
                .unwrap_or_else(|| inputs.energy_price.value(t));
            let carbon = c
                .carbon_intensity
                .as_ref()
                .map(|s| s.value(t))
                .unwrap_or_else(|| inputs.carbon_intensity.value(t));
            let cool_cost = (weights.cost * price + weights.carbon * carbon) * dt / c.cop;
            layout.cool.push(lp.add_var(
                format!("q_cool_{t}"),
                0.0,
                hvac.max_cool_at(t),
                cool_cost,
            ));
        }
        let d_cost = if comfort.occupied[t] { weights.comfort } else { 0.0 };
        layout
            .deviation
            .push(lp.add_var(format!("dev_{t}"), 0.0, f64::INFINITY, d_cost));
        layout.temp.push(lp.add_var(
            format!("temp_{}", t + 1),
            f64::NEG_INFINITY,
            f64::INFINITY,
            0.0,
        ));
    }

    for t in 0..n {
        let drive = b * (inputs.outdoor_temp.value(t) / params.resistance
            + params.solar_gain * inputs.irradiance.value(t));
        let mut terms = vec![(layout.temp[t], 1.0), (layout.heat[t], -b)];
        if let Some(&qc) = layout.cool.get(t) {
            terms.push((qc, b));
        }
        let rhs = if t == 0 {
            drive + a * initial_temp
        } else {
            terms.push((layout.temp[t - 1], -a));
            drive
        };
        lp.add_eq(terms, rhs);

        let target = comfort.target.value(t);
        lp.add_le(vec![(layout.temp[t], 1.0), (layout.deviation[t], -1.0)], target);
        lp.add_ge(vec![(layout.temp[t], 1.0), (layout.deviation[t], 1.0)], target);
    }

    Ok((lp, layout))
}

/// Optimises HVAC power over the whole input horizon and returns the
/// schedule replayed through [`simulate`], so the reported temperatures,
/// cost, carbon, and comfort are exactly what the twin produces for the
/// optimised commands.
pub fn optimise_horizon(
    params: &RcModelParams,
    hvac: &HvacSpec,
    comfort: &ComfortSpec,
    weights: &ObjectiveWeights,
    inputs: &ScenarioInputs,
    initial_temp: f64,
    opts: &SolveOptions,
) -> Result<BuildingSchedule> {
    params.validate()?;
    inputs.validate()?;
    let n = inputs.len();
    hvac.validate(n)?;
    comfort.validate(n)?;
    weights.validate()?;

    let (lp, layout) = build_horizon_lp(params, hvac, comfort, weights, inputs, initial_temp)?;
    let solution = solve_lp(&lp, opts)?;
    match solution.status {
        Status::Optimal => {}
        Status::Infeasible => {
            return Err(Error::Infeasible(
                "horizon optimisation reported infeasible".into(),
            ))
        }
        other => {
            return Err(Error::SolverLimit(format!(
                "horizon optimisation stopped with {other:?}"
            )))
        }
    }

    let heat: Vec<f64> = layout
        .heat
        .iter()
        .enumerate()
        .map(|(t, &v)| solution.value(v).clamp(0.0, hvac.max_heat_at(t)))
        .collect();
    let cool: Vec<f64> = (0..n)
        .map(|t| {
            layout
                .cool
                .get(t)
                .map(|&v| solution.value(v).clamp(0.0, hvac.max_cool_at(t)))
                .unwrap_or(0.0)
        })
        .collect();

    simulate(
        params,
        |t, _| HvacAction {
            heat: heat[t],
            cool: cool[t],
        },
        hvac,
        comfort,
        inputs,
        initial_temp,
    )
}

/// Rolling-horizon controller configuration.
#[derive(Debug, Clone)]
pub struct MpcConfig {
    /// Steps optimised per iteration; shrinks near the end of the run.
    pub horizon: usize,
    /// Standard deviation of the injected sensor noise, °C.
    pub feedback_noise_std: f64,
    /// Process noise variance assumed by the state filter.
    pub process_var: f64,
    pub seed: u64,
    pub solve: SolveOptions,
}

impl MpcConfig {
    pub fn new(horizon: usize) -> Self {
        Self {
            horizon,
            feedback_noise_std: 0.0,
            process_var: 0.01,
            seed: 0,
            solve: SolveOptions::default(),
        }
    }

    pub fn with_noise(mut self, std: f64) -> Self {
        self.feedback_noise_std = std;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Closed-loop run: at every step the controller optimises the next
/// `horizon` steps from its Kalman-filtered state estimate, only the first
/// command is applied to the plant, a noisy measurement of the plant
/// feeds the filter, and the window rolls forward. `plant_params` drive the
/// true plant; `controller_params` are the (possibly mismatched) model the
/// optimiser believes in.
#[allow(clippy::too_many_arguments)]
pub fn rolling_mpc(
    plant_params: &RcModelParams,
    controller_params: &RcModelParams,
    hvac: &HvacSpec,
    comfort: &ComfortSpec,
    weights: &ObjectiveWeights,
    inputs: &ScenarioInputs,
    initial_temp: f64,
    cfg: &MpcConfig,
) -> Result<BuildingSchedule> {
    plant_params.validate()?;
    controller_params.validate()?;
    inputs.validate()?;
    let n = inputs.len();
    hvac.validate(n)?;
    comfort.validate(n)?;
    if cfg.horizon == 0 || cfg.horizon > n {
        return Err(Error::InvalidInput(format!(
            "horizon {} outside 1..={n}",
            cfg.horizon
        )));
    }
    let dt = inputs.dt_hours();
    let a_ctl = 1.0
        - dt / (controller_params.resistance * controller_params.capacitance);
    let meas_var = cfg.feedback_noise_std * cfg.feedback_noise_std;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let mut plant_temp = initial_temp;
    let mut est_mean = initial_temp;
    let mut est_var = meas_var.max(1e-6);
    let mut actions: Vec<HvacAction> = Vec::with_capacity(n);

    for k in 0..n {
        let window = cfg.horizon.min(n - k);
        let win_inputs = inputs.slice(k, window)?;
        let win_comfort = ComfortSpec {
            target: comfort.target.slice(k, window)?,
            occupied: comfort.occupied[k..k + window].to_vec(),
            band: comfort.band,
        };
        let win_cooling = match &hvac.cooling {
            None => None,
            Some(c) => Some(super::CoolingSpec {
                q_max: c.q_max,
                cop: c.cop,
                energy_price: c
                    .energy_price
                    .as_ref()
                    .map(|s| s.slice(k, window))
                    .transpose()?,
                carbon_intensity: c
                    .carbon_intensity
                    .as_ref()
                    .map(|s| s.slice(k, window))
                    .transpose()?,
            }),
        };
        let win_hvac = HvacSpec {
            allowed_hours: hvac
                .allowed_hours
                .as_ref()
                .map(|m| m[k..k + window].to_vec()),
            cooling: win_cooling,
            ..hvac.clone()
        };
        let plan = optimise_horizon(
            controller_params,
            &win_hvac,
            &win_comfort,
            weights,
            &win_inputs,
            est_mean,
            &cfg.solve,
        )?;
        let action = HvacAction {
            heat: plan.heating.value(0),
            cool: plan.cooling.value(0),
        };
        actions.push(action);

        // Plant takes the first command.
        plant_temp = rc_step(
            plant_temp,
            inputs.outdoor_temp.value(k),
            action.heat - action.cool,
            inputs.irradiance.value(k),
            plant_params,
            dt,
        )?;

        // Filter: predict with the controller's model, update with a noisy
        // reading of the plant.
        est_mean = rc_step(
            est_mean,
            inputs.outdoor_temp.value(k),
            action.heat - action.cool,
            inputs.irradiance.value(k),
            controller_params,
            dt,
        )?;
        est_var = a_ctl * a_ctl * est_var + cfg.process_var;
        let noise: f64 = if cfg.feedback_noise_std > 0.0 {
            cfg.feedback_noise_std * rng.sample::<f64, _>(rand_distr::StandardNormal)
        } else {
            0.0
        };
        let z = plant_temp + noise;
        let (m, v) = kalman_update(est_mean, est_var, z, meas_var)?;
        est_mean = m;
        est_var = v;
    }

    simulate(
        plant_params,
        |t, _| actions[t],
        hvac,
        comfort,
        inputs,
        initial_temp,
    )
}
