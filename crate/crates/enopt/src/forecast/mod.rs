//! Base forecasting models, the weighted ensemble orchestrator, and
//! bottom-up hierarchical aggregation.
//!
//! The orchestrator is model agnostic: anything implementing
//! [`ForecastModel`] can join the pool, and the ensemble blends member
//! forecasts with non-negative weights summing to one. Weights adapt to
//! recent performance as the inverse of each model's rolling error.

mod backtest;
mod hierarchy;
mod models;

pub use backtest::{backtest, BacktestConfig, BacktestResult};
pub use hierarchy::{aggregate_bottom_up, Hierarchy, Level};
pub use models::{EmaModel, LinearArModel, SeasonalNaiveModel};

use crate::series::TimeSeries;
use crate::{Error, Result};

/// Exogenous regressor columns aligned to a history's start. For prediction
/// the columns must extend `horizon` steps beyond the fitted history.
#[derive(Debug, Clone, Default)]
pub struct Exogenous {
    columns: Vec<(String, Vec<f64>)>,
}

impl Exogenous {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(mut self, name: impl Into<String>, values: Vec<f64>) -> Self {
        self.columns.push((name.into(), values));
        self
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.columns.iter().map(|(n, _)| n.as_str())
    }

    pub fn num_columns(&self) -> usize {
        self.columns.len()
    }

    pub(crate) fn column(&self, idx: usize) -> &(String, Vec<f64>) {
        &self.columns[idx]
    }
}

/// A base forecasting model. `predict` after `fit` returns exactly
/// `horizon` values at the fitted history's resolution, starting one step
/// after the last observation.
pub trait ForecastModel {
    fn name(&self) -> &str;
    fn fit(&mut self, history: &TimeSeries, exogenous: Option<&Exogenous>) -> Result<()>;
    fn predict(&self, horizon: usize) -> Result<TimeSeries>;
}

/// Non-negative per-model weights summing to one.
#[derive(Debug, Clone)]
pub struct EnsembleWeights {
    weights: Vec<f64>,
}

impl EnsembleWeights {
    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("empty model set".into()));
        }
        Ok(Self {
            weights: vec![1.0 / n as f64; n],
        })
    }

    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        let w = Self { weights };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        if self.weights.is_empty() {
            return Err(Error::InvalidInput("empty model set".into()));
        }
        if self.weights.iter().any(|w| *w < 0.0 || !w.is_finite()) {
            return Err(Error::InvalidInput("weights must be non-negative".into()));
        }
        let sum: f64 = self.weights.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!(
                "weights sum to {sum}, expected 1"
            )));
        }
        Ok(())
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Inverse-error weighting: `w_m = (e_m + eps)^-1 / sum_k (e_k + eps)^-1`.
/// Smaller rolling error means larger weight; `eps` keeps a perfect model
/// from collapsing the distribution entirely.
pub fn update_weights(recent_errors: &[f64], epsilon: f64) -> Result<EnsembleWeights> {
    if recent_errors.is_empty() {
        return Err(Error::InvalidInput("empty model set".into()));
    }
    if epsilon <= 0.0 {
        return Err(Error::InvalidInput("epsilon must be positive".into()));
    }
    if recent_errors.iter().any(|e| *e < 0.0 || !e.is_finite()) {
        return Err(Error::InvalidInput(
            "rolling errors must be non-negative".into(),
        ));
    }
    let inv: Vec<f64> = recent_errors.iter().map(|e| 1.0 / (e + epsilon)).collect();
    let total: f64 = inv.iter().sum();
    EnsembleWeights::from_weights(inv.iter().map(|v| v / total).collect())
}

/// Pointwise weighted sum of member forecasts.
pub fn ensemble_forecast(
    members: &[TimeSeries],
    weights: &EnsembleWeights,
) -> Result<TimeSeries> {
    weights.validate()?;
    if members.len() != weights.len() {
        return Err(Error::InvalidInput(format!(
            "{} member forecasts but {} weights",
            members.len(),
            weights.len()
        )));
    }
    let first = &members[0];
    for m in members.iter().skip(1) {
        first.check_aligned(m, "ensemble member horizon")?;
    }
    let mut values = vec![0.0; first.len()];
    for (m, w) in members.iter().zip(weights.as_slice()) {
        for (acc, v) in values.iter_mut().zip(m.values()) {
            *acc += w * v;
        }
    }
    first.with_values(values)
}

#[cfg(test)]
mod tests {
    use chrono::Duration;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::series::t0;

    fn series(values: Vec<f64>) -> TimeSeries {
        TimeSeries::new(t0(), Duration::minutes(30), values, "kWh").unwrap()
    }

    #[test]
    fn inverse_error_hand_values() {
        // errors [1, 3]: inverses [1, 1/3] normalise to [0.75, 0.25].
        let w = update_weights(&[1.0, 3.0], 1e-12).unwrap();
        assert!((w.as_slice()[0] - 0.75).abs() < 1e-9);
        assert!((w.as_slice()[1] - 0.25).abs() < 1e-9);
    }

    #[test]
    fn equal_errors_uniform() {
        let w = update_weights(&[2.5, 2.5, 2.5], 1e-6).unwrap();
        for &wi in w.as_slice() {
            assert!((wi - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn perfect_model_dominates() {
        let w = update_weights(&[0.0, 1.0], 1e-6).unwrap();
        assert!(w.as_slice()[0] > 0.999);
    }

    #[test]
    fn empty_or_bad_inputs_rejected() {
        assert!(update_weights(&[], 1e-6).is_err());
        assert!(update_weights(&[1.0], 0.0).is_err());
        assert!(update_weights(&[-1.0], 1e-6).is_err());
    }

    #[test]
    fn weights_always_normalised() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let n = rng.gen_range(1..8);
            let errors: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..50.0)).collect();
            let w = update_weights(&errors, 1e-6).unwrap();
            let sum: f64 = w.as_slice().iter().sum();
            assert!((sum - 1.0).abs() <= 1e-12);
            assert!(w.as_slice().iter().all(|&x| x >= 0.0));
        }
    }

    #[test]
    fn lower_error_gets_higher_weight() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let a = rng.gen_range(0.0..10.0);
            let b = a + rng.gen_range(0.1..5.0);
            let w = update_weights(&[a, b], 1e-8).unwrap();
            assert!(w.as_slice()[0] > w.as_slice()[1]);
        }
    }

    #[test]
    fn single_member_identity() {
        let f = series(vec![1.0, 2.0, 3.0]);
        let out = ensemble_forecast(&[f.clone()], &EnsembleWeights::uniform(1).unwrap()).unwrap();
        assert_eq!(out.values(), f.values());
    }

    #[test]
    fn midpoint_of_two_constants() {
        let a = series(vec![0.0; 4]);
        let b = series(vec![10.0; 4]);
        let w = EnsembleWeights::from_weights(vec![0.5, 0.5]).unwrap();
        let out = ensemble_forecast(&[a, b], &w).unwrap();
        assert_eq!(out.values(), &[5.0; 4]);
    }

    #[test]
    fn ensemble_within_member_envelope() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let h = rng.gen_range(1..12);
            let members: Vec<TimeSeries> = (0..3)
                .map(|_| series((0..h).map(|_| rng.gen_range(-5.0..5.0)).collect()))
                .collect();
            let raw: Vec<f64> = (0..3).map(|_| rng.gen_range(0.01..1.0)).collect();
            let total: f64 = raw.iter().sum();
            let w =
                EnsembleWeights::from_weights(raw.iter().map(|x| x / total).collect()).unwrap();
            let out = ensemble_forecast(&members, &w).unwrap();
            for k in 0..h {
                let lo = members.iter().map(|m| m.value(k)).fold(f64::INFINITY, f64::min);
                let hi = members
                    .iter()
                    .map(|m| m.value(k))
                    .fold(f64::NEG_INFINITY, f64::max);
                assert!(out.value(k) >= lo - 1e-12 && out.value(k) <= hi + 1e-12);
            }
        }
    }

    #[test]
    fn horizon_mismatch_rejected() {
        let a = series(vec![1.0, 2.0]);
        let b = series(vec![1.0, 2.0, 3.0]);
        let w = EnsembleWeights::uniform(2).unwrap();
        assert!(ensemble_forecast(&[a, b], &w).is_err());
    }
}
