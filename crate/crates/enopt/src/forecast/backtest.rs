//! Rolling-origin backtesting with causal weight updates.

use super::{ensemble_forecast, update_weights, EnsembleWeights, Exogenous, ForecastModel};
use crate::series::{score_values, AccuracyReport, TimeSeries};
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct BacktestConfig {
    /// Trailing steps of recorded errors feeding each weight update.
    pub window: usize,
    /// Steps predicted per fold; folds advance by this much.
    pub horizon: usize,
    /// Smoothing for the inverse-error weights.
    pub epsilon: f64,
}

impl Default for BacktestConfig {
    fn default() -> Self {
        Self {
            // One week of half-hourly steps.
            window: 336,
            horizon: 48,
            epsilon: 1e-6,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BacktestResult {
    /// Ensemble accuracy over every evaluated step.
    pub accuracy: AccuracyReport,
    /// Per-model accuracy over the same steps, in pool order.
    pub per_model_accuracy: Vec<AccuracyReport>,
    /// Weights used at each fold: `(fold origin index, weights)`.
    pub weight_trajectory: Vec<(usize, Vec<f64>)>,
    /// Ensemble prediction aligned with the history; NaN where a step was
    /// never part of a fold.
    pub ensemble_prediction: Vec<f64>,
    /// Per-model predictions on the same alignment.
    pub model_predictions: Vec<Vec<f64>>,
}

/// Rolling-origin evaluation of a model pool. At each fold origin the
/// models are refitted on data strictly before the origin, the ensemble
/// weights are recomputed from recorded errors in the trailing `window`
/// only, and the weighted forecast is scored against the held-out horizon.
/// Nothing after a fold's origin influences that fold's weights.
pub fn backtest(
    models: &mut [Box<dyn ForecastModel>],
    history: &TimeSeries,
    exogenous: Option<&Exogenous>,
    cfg: &BacktestConfig,
) -> Result<BacktestResult> {
    if models.is_empty() {
        return Err(Error::InvalidInput("empty model set".into()));
    }
    let n = history.len();
    if cfg.window == 0 || cfg.window > n {
        return Err(Error::InvalidInput(format!(
            "window of {} steps does not fit a history of {n}",
            cfg.window
        )));
    }
    if cfg.horizon == 0 {
        return Err(Error::InvalidInput("horizon must be positive".into()));
    }
    let first_origin = cfg.window;
    if first_origin + cfg.horizon > n {
        return Err(Error::InvalidInput(format!(
            "history of {n} steps is too short for one fold \
             (needs window {} + horizon {})",
            cfg.window, cfg.horizon
        )));
    }

    let n_models = models.len();
    // Per-model absolute error at each evaluated step; NaN = not evaluated.
    let mut step_errors = vec![vec![f64::NAN; n]; n_models];
    let mut ens_pred = vec![f64::NAN; n];
    let mut model_pred = vec![vec![f64::NAN; n]; n_models];
    let mut trajectory = Vec::new();

    let mut origin = first_origin;
    while origin + cfg.horizon <= n {
        let weights = fold_weights(&step_errors, origin, cfg)?;
        trajectory.push((origin, weights.as_slice().to_vec()));

        let prefix = history.slice(0, origin)?;
        let mut member_forecasts = Vec::with_capacity(n_models);
        for model in models.iter_mut() {
            model.fit(&prefix, exogenous)?;
            member_forecasts.push(model.predict(cfg.horizon)?);
        }
        let blended = ensemble_forecast(&member_forecasts, &weights)?;

        for h in 0..cfg.horizon {
            let t = origin + h;
            let actual = history.value(t);
            if actual.is_nan() {
                continue;
            }
            ens_pred[t] = blended.value(h);
            for (m, f) in member_forecasts.iter().enumerate() {
                model_pred[m][t] = f.value(h);
                step_errors[m][t] = (f.value(h) - actual).abs();
            }
        }
        origin += cfg.horizon;
    }

    let accuracy = score_values(history.values(), &ens_pred)?;
    let per_model_accuracy = model_pred
        .iter()
        .map(|p| score_values(history.values(), p))
        .collect::<Result<Vec<_>>>()?;

    Ok(BacktestResult {
        accuracy,
        per_model_accuracy,
        weight_trajectory: trajectory,
        ensemble_prediction: ens_pred,
        model_predictions: model_pred,
    })
}

/// Weights for a fold at `origin`: rolling MAE per model over recorded
/// errors in `[origin - window, origin)`, inverted and normalised. Uniform
/// until any errors exist.
fn fold_weights(
    step_errors: &[Vec<f64>],
    origin: usize,
    cfg: &BacktestConfig,
) -> Result<EnsembleWeights> {
    let lo = origin.saturating_sub(cfg.window);
    let mut maes = Vec::with_capacity(step_errors.len());
    let mut any = false;
    for errs in step_errors {
        let recorded: Vec<f64> = errs[lo..origin].iter().copied().filter(|e| !e.is_nan()).collect();
        if recorded.is_empty() {
            maes.push(0.0);
        } else {
            any = true;
            maes.push(recorded.iter().sum::<f64>() / recorded.len() as f64);
        }
    }
    if !any {
        return EnsembleWeights::uniform(step_errors.len());
    }
    update_weights(&maes, cfg.epsilon)
}

#[cfg(test)]
mod tests {
    use chrono::Duration;

    use super::*;
    use crate::forecast::{EmaModel, SeasonalNaiveModel};
    use crate::series::t0;

    fn series(values: Vec<f64>) -> TimeSeries {
        TimeSeries::new(t0(), Duration::minutes(30), values, "kWh").unwrap()
    }

    fn periodic(n: usize) -> Vec<f64> {
        (0..n).map(|i| [2.0, 6.0, 9.0, 4.0][i % 4]).collect()
    }

    #[test]
    fn perfect_model_takes_over() {
        // Seasonal naive is exact on a periodic series; EMA is not. After
        // the first fold records errors, the seasonal weight should swamp
        // the pool and the ensemble error should collapse.
        let history = series(periodic(64));
        let mut models: Vec<Box<dyn ForecastModel>> = vec![
            Box::new(SeasonalNaiveModel::new(4)),
            Box::new(EmaModel::new(0.3)),
        ];
        let cfg = BacktestConfig {
            window: 16,
            horizon: 4,
            epsilon: 1e-6,
        };
        let out = backtest(&mut models, &history, None, &cfg).unwrap();
        let last = &out.weight_trajectory.last().unwrap().1;
        assert!(last[0] > 0.999, "seasonal weight {}", last[0]);
        // Ensemble error after adaptation is tiny; the overall MAE is
        // dominated by the single uniform-weight fold.
        let uniform_folds = out
            .weight_trajectory
            .iter()
            .filter(|(_, w)| (w[0] - 0.5).abs() < 1e-12)
            .count();
        assert_eq!(uniform_folds, 1);
        assert!(out.per_model_accuracy[0].mae < 1e-12);
    }

    #[test]
    fn single_model_pool_equals_direct_score() {
        let history = series(periodic(48));
        let cfg = BacktestConfig {
            window: 8,
            horizon: 4,
            epsilon: 1e-6,
        };
        let mut pool: Vec<Box<dyn ForecastModel>> = vec![Box::new(EmaModel::new(0.5))];
        let out = backtest(&mut pool, &history, None, &cfg).unwrap();
        assert!((out.accuracy.mae - out.per_model_accuracy[0].mae).abs() < 1e-12);
        for (_, w) in &out.weight_trajectory {
            assert_eq!(w, &vec![1.0]);
        }
    }

    #[test]
    fn window_larger_than_history_errors() {
        let history = series(periodic(16));
        let cfg = BacktestConfig {
            window: 32,
            horizon: 4,
            epsilon: 1e-6,
        };
        let mut pool: Vec<Box<dyn ForecastModel>> = vec![Box::new(EmaModel::new(0.5))];
        assert!(backtest(&mut pool, &history, None, &cfg).is_err());
    }

    #[test]
    fn weights_ignore_the_future() {
        // Two histories identical up to step 40, then one switches regime.
        // Every fold with origin <= 40 must produce identical weights.
        let base = periodic(80);
        let mut switched = base.clone();
        for v in switched.iter_mut().skip(40) {
            *v = 20.0 - *v;
        }
        let cfg = BacktestConfig {
            window: 12,
            horizon: 4,
            epsilon: 1e-6,
        };
        let run = |values: Vec<f64>| {
            let mut pool: Vec<Box<dyn ForecastModel>> = vec![
                Box::new(SeasonalNaiveModel::new(4)),
                Box::new(EmaModel::new(0.3)),
            ];
            backtest(&mut pool, &series(values), None, &cfg).unwrap()
        };
        let a = run(base);
        let b = run(switched);
        for ((origin_a, wa), (origin_b, wb)) in
            a.weight_trajectory.iter().zip(&b.weight_trajectory)
        {
            assert_eq!(origin_a, origin_b);
            if origin_a + cfg.horizon <= 40 {
                assert_eq!(wa, wb, "weights diverged at causal fold {origin_a}");
            }
        }
    }
}
