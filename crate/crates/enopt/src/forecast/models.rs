//! The built-in base model pool: exponential smoothing, seasonal naive, and
//! a linear autoregression with optional exogenous regressors.

use chrono::{DateTime, Duration, Utc};

use super::{Exogenous, ForecastModel};
use crate::series::TimeSeries;
use crate::{Error, Result};

#[derive(Debug, Clone)]
struct FitMeta {
    next_start: DateTime<Utc>,
    resolution: Duration,
    unit: String,
    history_len: usize,
}

impl FitMeta {
    fn from_history(history: &TimeSeries) -> Self {
        Self {
            next_start: history.timestamp(history.len() - 1) + history.resolution(),
            resolution: history.resolution(),
            unit: history.unit().to_string(),
            history_len: history.len(),
        }
    }

    fn series(&self, values: Vec<f64>) -> Result<TimeSeries> {
        TimeSeries::new(self.next_start, self.resolution, values, self.unit.clone())
    }
}

/// Exponential moving average: level `l_t = alpha * y_t + (1 - alpha) *
/// l_{t-1}` seeded with the first observation; every forecast step equals
/// the final level.
#[derive(Debug, Clone)]
pub struct EmaModel {
    alpha: f64,
    state: Option<(f64, FitMeta)>,
}

impl EmaModel {
    pub fn new(alpha: f64) -> Self {
        Self { alpha, state: None }
    }

    pub fn level(&self) -> Option<f64> {
        self.state.as_ref().map(|(l, _)| *l)
    }
}

impl ForecastModel for EmaModel {
    fn name(&self) -> &str {
        "ema"
    }

    fn fit(&mut self, history: &TimeSeries, _exogenous: Option<&Exogenous>) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::InvalidInput(format!(
                "smoothing factor must be in (0, 1], got {}",
                self.alpha
            )));
        }
        let values = history.dense()?;
        if values.is_empty() {
            return Err(Error::InvalidInput("history is empty".into()));
        }
        let mut level = values[0];
        for &y in &values[1..] {
            level = self.alpha * y + (1.0 - self.alpha) * level;
        }
        self.state = Some((level, FitMeta::from_history(history)));
        Ok(())
    }

    fn predict(&self, horizon: usize) -> Result<TimeSeries> {
        let (level, meta) = self
            .state
            .as_ref()
            .ok_or_else(|| Error::InvalidInput("model not fitted".into()))?;
        meta.series(vec![*level; horizon])
    }
}

/// Repeats the last observed season: step `h` ahead forecasts the value one
/// season earlier, cycling when the horizon exceeds the season.
#[derive(Debug, Clone)]
pub struct SeasonalNaiveModel {
    season_length: usize,
    state: Option<(Vec<f64>, FitMeta)>,
}

impl SeasonalNaiveModel {
    pub fn new(season_length: usize) -> Self {
        Self {
            season_length,
            state: None,
        }
    }
}

impl ForecastModel for SeasonalNaiveModel {
    fn name(&self) -> &str {
        "seasonal-naive"
    }

    fn fit(&mut self, history: &TimeSeries, _exogenous: Option<&Exogenous>) -> Result<()> {
        if self.season_length == 0 {
            return Err(Error::InvalidInput("season length must be positive".into()));
        }
        let values = history.dense()?;
        if values.len() < self.season_length {
            return Err(Error::InvalidInput(format!(
                "history of {} values is shorter than one season ({})",
                values.len(),
                self.season_length
            )));
        }
        let season = values[values.len() - self.season_length..].to_vec();
        self.state = Some((season, FitMeta::from_history(history)));
        Ok(())
    }

    fn predict(&self, horizon: usize) -> Result<TimeSeries> {
        let (season, meta) = self
            .state
            .as_ref()
            .ok_or_else(|| Error::InvalidInput("model not fitted".into()))?;
        let values = (0..horizon).map(|h| season[h % season.len()]).collect();
        meta.series(values)
    }
}

/// Ordinary-least-squares autoregression on `lags` past values plus any
/// exogenous columns, predicted recursively over the horizon. Multi-step
/// prediction needs exogenous columns extending `horizon` rows past the
/// fitted history.
#[derive(Debug, Clone)]
pub struct LinearArModel {
    lags: usize,
    state: Option<ArState>,
}

#[derive(Debug, Clone)]
struct ArState {
    /// intercept, lag coefficients (most recent first), exogenous coefficients
    coeffs: Vec<f64>,
    recent: Vec<f64>,
    exogenous: Option<Exogenous>,
    meta: FitMeta,
}

impl LinearArModel {
    pub fn new(lags: usize) -> Self {
        Self { lags, state: None }
    }

    pub fn coefficients(&self) -> Option<&[f64]> {
        self.state.as_ref().map(|s| s.coeffs.as_slice())
    }
}

impl ForecastModel for LinearArModel {
    fn name(&self) -> &str {
        "linear-ar"
    }

    fn fit(&mut self, history: &TimeSeries, exogenous: Option<&Exogenous>) -> Result<()> {
        if self.lags == 0 {
            return Err(Error::InvalidInput("lag count must be positive".into()));
        }
        let y = history.dense()?;
        let n = y.len();
        let n_exog = exogenous.map(|e| e.num_columns()).unwrap_or(0);
        let k = 1 + self.lags + n_exog;
        if n <= self.lags + n_exog + 1 {
            return Err(Error::InvalidInput(format!(
                "history of {n} values is too short for {} lags and {n_exog} regressors",
                self.lags
            )));
        }
        if let Some(exog) = exogenous {
            for idx in 0..n_exog {
                let (name, col) = exog.column(idx);
                if col.len() < n {
                    return Err(Error::InvalidInput(format!(
                        "exogenous column '{name}' has {} rows, history has {n}",
                        col.len()
                    )));
                }
            }
        }

        let rows = n - self.lags;
        let mut design = Vec::with_capacity(rows);
        let mut target = Vec::with_capacity(rows);
        for t in self.lags..n {
            let mut row = Vec::with_capacity(k);
            row.push(1.0);
            for lag in 1..=self.lags {
                row.push(y[t - lag]);
            }
            if let Some(exog) = exogenous {
                for idx in 0..n_exog {
                    row.push(exog.column(idx).1[t]);
                }
            }
            design.push(row);
            target.push(y[t]);
        }

        let col_name = |j: usize| -> String {
            if j == 0 {
                "intercept".to_string()
            } else if j <= self.lags {
                format!("lag {j}")
            } else {
                exogenous
                    .map(|e| e.column(j - 1 - self.lags).0.clone())
                    .unwrap_or_else(|| format!("column {j}"))
            }
        };
        let coeffs = ols(&design, &target, &col_name)?;

        self.state = Some(ArState {
            coeffs,
            recent: y[n - self.lags..].to_vec(),
            exogenous: exogenous.cloned(),
            meta: FitMeta::from_history(history),
        });
        Ok(())
    }

    fn predict(&self, horizon: usize) -> Result<TimeSeries> {
        let state = self
            .state
            .as_ref()
            .ok_or_else(|| Error::InvalidInput("model not fitted".into()))?;
        let n = state.meta.history_len;
        if let Some(exog) = &state.exogenous {
            for idx in 0..exog.num_columns() {
                let (name, col) = exog.column(idx);
                if col.len() < n + horizon {
                    return Err(Error::InvalidInput(format!(
                        "exogenous column '{name}' has {} rows, prediction needs {}",
                        col.len(),
                        n + horizon
                    )));
                }
            }
        }
        let lags = state.recent.len();
        let mut window = state.recent.clone();
        let mut out = Vec::with_capacity(horizon);
        for h in 0..horizon {
            let mut yhat = state.coeffs[0];
            for lag in 1..=lags {
                yhat += state.coeffs[lag] * window[lags - lag];
            }
            if let Some(exog) = &state.exogenous {
                for idx in 0..exog.num_columns() {
                    yhat += state.coeffs[1 + lags + idx] * exog.column(idx).1[n + h];
                }
            }
            out.push(yhat);
            window.rotate_left(1);
            window[lags - 1] = yhat;
        }
        state.meta.series(out)
    }
}

/// Least squares via the normal equations, factored by an unpivoted
/// Cholesky so a collapsing diagonal names the first column that adds no
/// rank beyond the earlier regressors.
fn ols(design: &[Vec<f64>], target: &[f64], col_name: &dyn Fn(usize) -> String) -> Result<Vec<f64>> {
    let rows = design.len();
    let k = design[0].len();
    let mut ata = vec![vec![0.0; k]; k];
    let mut atb = vec![0.0; k];
    for r in 0..rows {
        for i in 0..k {
            let di = design[r][i];
            atb[i] += di * target[r];
            for j in i..k {
                ata[i][j] += di * design[r][j];
            }
        }
    }

    let mut lower = vec![vec![0.0; k]; k];
    for j in 0..k {
        let mut d = ata[j][j];
        for l in 0..j {
            d -= lower[j][l] * lower[j][l];
        }
        if d <= 1e-10 * ata[j][j].max(1e-300) {
            return Err(Error::RankDeficient(format!(
                "column '{}' is collinear with earlier regressors",
                col_name(j)
            )));
        }
        lower[j][j] = d.sqrt();
        for i in j + 1..k {
            let mut s = ata[j][i];
            for l in 0..j {
                s -= lower[i][l] * lower[j][l];
            }
            lower[i][j] = s / lower[j][j];
        }
    }

    // Solve L z = A'b, then L' x = z.
    let mut z = vec![0.0; k];
    for i in 0..k {
        let mut s = atb[i];
        for l in 0..i {
            s -= lower[i][l] * z[l];
        }
        z[i] = s / lower[i][i];
    }
    let mut x = vec![0.0; k];
    for i in (0..k).rev() {
        let mut s = z[i];
        for l in i + 1..k {
            s -= lower[l][i] * x[l];
        }
        x[i] = s / lower[i][i];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::series::t0;

    fn series(values: Vec<f64>) -> TimeSeries {
        TimeSeries::new(t0(), Duration::minutes(30), values, "kWh").unwrap()
    }

    #[test]
    fn ema_constant_fixed_point() {
        for alpha in [0.1, 0.5, 1.0] {
            let mut m = EmaModel::new(alpha);
            m.fit(&series(vec![5.0, 5.0, 5.0]), None).unwrap();
            let f = m.predict(3).unwrap();
            assert_eq!(f.values(), &[5.0; 3]);
        }
    }

    #[test]
    fn ema_hand_recursion() {
        // l0 = 0 (first observation), l1 = 0.5*10 + 0.5*0 = 5.
        let mut m = EmaModel::new(0.5);
        m.fit(&series(vec![0.0, 10.0]), None).unwrap();
        assert_eq!(m.level(), Some(5.0));
        assert_eq!(m.predict(2).unwrap().values(), &[5.0, 5.0]);
    }

    #[test]
    fn ema_alpha_one_is_last_observation() {
        let mut m = EmaModel::new(1.0);
        m.fit(&series(vec![3.0, 9.0, 4.0]), None).unwrap();
        assert_eq!(m.predict(1).unwrap().values(), &[4.0]);
    }

    #[test]
    fn ema_alpha_out_of_range() {
        assert!(EmaModel::new(0.0).fit(&series(vec![1.0]), None).is_err());
        assert!(EmaModel::new(1.5).fit(&series(vec![1.0]), None).is_err());
    }

    #[test]
    fn seasonal_perfect_on_periodic() {
        let pattern = [1.0, 5.0, 3.0, 7.0];
        let values: Vec<f64> = (0..16).map(|i| pattern[i % 4]).collect();
        let mut m = SeasonalNaiveModel::new(4);
        m.fit(&series(values.clone()), None).unwrap();
        let f = m.predict(8).unwrap();
        for (h, v) in f.values().iter().enumerate() {
            assert_eq!(*v, pattern[h % 4]);
        }
    }

    #[test]
    fn seasonal_length_one_repeats_last() {
        let mut m = SeasonalNaiveModel::new(1);
        m.fit(&series(vec![2.0, 8.0]), None).unwrap();
        assert_eq!(m.predict(3).unwrap().values(), &[8.0; 3]);
    }

    #[test]
    fn seasonal_insufficient_history() {
        let mut m = SeasonalNaiveModel::new(10);
        assert!(m.fit(&series(vec![1.0; 5]), None).is_err());
    }

    #[test]
    fn seasonal_forecast_is_lagged_slice() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let values: Vec<f64> = (0..40).map(|_| rng.gen_range(0.0..9.0)).collect();
        let mut m = SeasonalNaiveModel::new(8);
        m.fit(&series(values.clone()), None).unwrap();
        let f = m.predict(8).unwrap();
        assert_eq!(f.values(), &values[32..40]);
    }

    #[test]
    fn ar_recovers_doubling_rule() {
        let mut values = vec![1.0];
        for _ in 0..11 {
            values.push(values.last().unwrap() * 2.0);
        }
        let mut m = LinearArModel::new(1);
        m.fit(&series(values), None).unwrap();
        let coeffs = m.coefficients().unwrap();
        assert!((coeffs[1] - 2.0).abs() < 1e-9, "slope {}", coeffs[1]);
        assert!(coeffs[0].abs() < 1e-6, "intercept {}", coeffs[0]);
        let f = m.predict(3).unwrap();
        assert!((f.value(1) / f.value(0) - 2.0).abs() < 1e-6);
        assert!((f.value(2) / f.value(1) - 2.0).abs() < 1e-6);
    }

    #[test]
    fn ar_zero_variance_exog_is_rank_deficient() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let values: Vec<f64> = (0..30).map(|_| rng.gen_range(0.0..5.0)).collect();
        let exog = Exogenous::new().push("flatline", vec![3.0; 30]);
        let mut m = LinearArModel::new(1);
        let err = m.fit(&series(values), Some(&exog)).unwrap_err();
        match err {
            Error::RankDeficient(msg) => assert!(msg.contains("flatline"), "{msg}"),
            other => panic!("expected rank deficiency, got {other}"),
        }
    }

    #[test]
    fn ar_white_noise_coefficient_near_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let values: Vec<f64> = (0..500).map(|_| rng.sample::<f64, _>(rand_distr()) ).collect();
        let mean: f64 = values.iter().sum::<f64>() / values.len() as f64;
        let mut m = LinearArModel::new(1);
        m.fit(&series(values), None).unwrap();
        let coeffs = m.coefficients().unwrap();
        // Roughly 3 standard errors for an AR(1) slope on n iid points.
        let bound = 3.0 / (500.0f64).sqrt();
        assert!(coeffs[1].abs() < bound, "slope {} vs bound {bound}", coeffs[1]);
        let f = m.predict(1).unwrap();
        assert!((f.value(0) - mean).abs() < 0.2, "forecast {} mean {mean}", f.value(0));
    }

    fn rand_distr() -> rand::distributions::Uniform<f64> {
        rand::distributions::Uniform::new(-1.0, 1.0)
    }

    #[test]
    fn ar_exog_too_short_for_horizon() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let n = 30;
        let exog_col: Vec<f64> = (0..n).map(|i| (i as f64 * 0.3).sin()).collect();
        let values: Vec<f64> = exog_col
            .iter()
            .map(|x| 2.0 * x + rng.gen_range(-0.01..0.01))
            .collect();
        let exog = Exogenous::new().push("driver", exog_col);
        let mut m = LinearArModel::new(1);
        m.fit(&series(values), Some(&exog)).unwrap();
        assert!(m.predict(1).is_err());
    }
}
