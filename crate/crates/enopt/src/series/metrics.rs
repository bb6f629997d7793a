//! Accuracy metrics shared by the forecasting, building, and dispatch
//! modules.

use serde::Serialize;

use super::TimeSeries;
use crate::{Error, Result};

/// Standard error metrics of a prediction against observations.
///
/// `mape`, `nmae`, and `r2` are `None` when undefined (no nonzero actuals,
/// zero mean absolute actual, or zero variance respectively); they serialise
/// as JSON `null`. `mape` and `smape` are fractions, not percentages, with
/// `smape` on the [0, 2] scale.
#[derive(Debug, Clone, Serialize)]
pub struct AccuracyReport {
    pub mae: f64,
    pub mape: Option<f64>,
    pub rmse: f64,
    pub nmae: Option<f64>,
    pub smape: f64,
    pub r2: Option<f64>,
    pub n: usize,
}

/// Scores `predicted` against `actual` over the indices where both are
/// present. MAPE is computed only over nonzero actuals; sMAPE terms with a
/// zero denominator count as zero.
pub fn score(actual: &TimeSeries, predicted: &TimeSeries) -> Result<AccuracyReport> {
    if actual.len() != predicted.len() {
        return Err(Error::InvalidInput(format!(
            "length mismatch: actual has {} values, predicted has {}",
            actual.len(),
            predicted.len()
        )));
    }
    actual.check_aligned(predicted, "score")?;
    score_values(actual.values(), predicted.values())
}

/// Same as [`score`] but over raw slices (no timeline to check).
pub fn score_values(actual: &[f64], predicted: &[f64]) -> Result<AccuracyReport> {
    if actual.len() != predicted.len() {
        return Err(Error::InvalidInput(format!(
            "length mismatch: actual has {} values, predicted has {}",
            actual.len(),
            predicted.len()
        )));
    }
    let pairs: Vec<(f64, f64)> = actual
        .iter()
        .zip(predicted)
        .filter(|(a, p)| !a.is_nan() && !p.is_nan())
        .map(|(a, p)| (*a, *p))
        .collect();
    let n = pairs.len();
    if n == 0 {
        return Err(Error::InvalidInput(
            "no overlapping observed values to score".into(),
        ));
    }
    let nf = n as f64;

    let mut abs_sum = 0.0;
    let mut sq_sum = 0.0;
    let mut abs_actual_sum = 0.0;
    let mut mape_sum = 0.0;
    let mut mape_n = 0usize;
    let mut smape_sum = 0.0;
    let mut actual_sum = 0.0;
    for &(a, p) in &pairs {
        let e = p - a;
        abs_sum += e.abs();
        sq_sum += e * e;
        abs_actual_sum += a.abs();
        actual_sum += a;
        if a != 0.0 {
            mape_sum += (e / a).abs();
            mape_n += 1;
        }
        let denom = a.abs() + p.abs();
        if denom > 0.0 {
            smape_sum += 2.0 * e.abs() / denom;
        }
    }
    let mae = abs_sum / nf;
    let rmse = (sq_sum / nf).sqrt();
    let mape = if mape_n > 0 {
        Some(mape_sum / mape_n as f64)
    } else {
        None
    };
    let nmae = if abs_actual_sum > 0.0 {
        Some(mae / (abs_actual_sum / nf))
    } else {
        None
    };
    let smape = smape_sum / nf;

    let mean_actual = actual_sum / nf;
    let sst: f64 = pairs.iter().map(|(a, _)| (a - mean_actual).powi(2)).sum();
    let r2 = if sst > 0.0 {
        Some(1.0 - sq_sum / sst)
    } else {
        None
    };

    Ok(AccuracyReport {
        mae,
        mape,
        rmse,
        nmae,
        smape,
        r2,
        n,
    })
}

#[cfg(test)]
mod tests {
    use chrono::Duration;

    use super::*;
    use crate::series::t0;

    fn series(values: Vec<f64>) -> TimeSeries {
        TimeSeries::new(t0(), Duration::minutes(30), values, "kWh").unwrap()
    }

    #[test]
    fn single_point_percentages() {
        let r = score(&series(vec![100.0]), &series(vec![110.0])).unwrap();
        assert!((r.mae - 10.0).abs() < 1e-12);
        assert!((r.mape.unwrap() - 0.10).abs() < 1e-12);
        // 2 * 10 / 210
        assert!((r.smape - 0.095_238_095_238).abs() < 1e-9);
    }

    #[test]
    fn rmse_hand_value() {
        // sqrt((9 + 16) / 2)
        let r = score(&series(vec![0.0, 0.0]), &series(vec![3.0, 4.0])).unwrap();
        assert!((r.rmse - 3.535_533_905_932_738).abs() < 1e-12);
        assert!(r.mape.is_none());
        assert!(r.nmae.is_none());
    }

    #[test]
    fn perfect_prediction() {
        let s = series(vec![1.0, 4.0, 2.0, 8.0]);
        let r = score(&s, &s).unwrap();
        assert_eq!(r.mae, 0.0);
        assert_eq!(r.rmse, 0.0);
        assert_eq!(r.mape, Some(0.0));
        assert_eq!(r.nmae, Some(0.0));
        assert_eq!(r.smape, 0.0);
        assert_eq!(r.r2, Some(1.0));
    }

    #[test]
    fn constant_actual_has_undefined_r2() {
        let r = score(&series(vec![5.0, 5.0]), &series(vec![5.0, 6.0])).unwrap();
        assert!(r.r2.is_none());
    }

    #[test]
    fn length_mismatch_errors() {
        assert!(score(&series(vec![1.0]), &series(vec![1.0, 2.0])).is_err());
    }

    #[test]
    fn missing_pairs_are_skipped() {
        let r = score(
            &series(vec![1.0, f64::NAN, 3.0]),
            &series(vec![1.5, 2.0, f64::NAN]),
        )
        .unwrap();
        assert_eq!(r.n, 1);
        assert!((r.mae - 0.5).abs() < 1e-12);
    }

    #[test]
    fn rmse_dominates_mae() {
        // Cauchy-Schwarz: rmse >= mae for any error vector.
        let cases = [
            vec![1.0, -2.0, 0.5, 4.0],
            vec![0.0, 0.0, 0.0],
            vec![-3.0, 3.0],
        ];
        for errs in cases {
            let actual = vec![10.0; errs.len()];
            let pred: Vec<f64> = errs.iter().map(|e| 10.0 + e).collect();
            let r = score_values(&actual, &pred).unwrap();
            assert!(r.rmse >= r.mae - 1e-12);
        }
    }

    #[test]
    fn json_field_names_fixed() {
        let r = score(&series(vec![1.0]), &series(vec![2.0])).unwrap();
        let json = serde_json::to_value(&r).unwrap();
        for key in ["mae", "mape", "rmse", "nmae", "smape", "r2", "n"] {
            assert!(json.get(key).is_some(), "missing key {key}");
        }
    }
}
