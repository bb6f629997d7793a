//! Weighted ensemble forecasting over a meter portfolio: base models,
//! inverse-error weights, a causal backtest, and bottom-up aggregation.
//!
//! Run with: cargo run --release --example forecast_ensemble

use std::collections::BTreeMap;

use enopt::forecast::{
    aggregate_bottom_up, backtest, ensemble_forecast, update_weights, BacktestConfig, EmaModel,
    ForecastModel, Level, LinearArModel, SeasonalNaiveModel,
};
use enopt::synth;

fn main() {
    let seed = 42;
    let weeks = 4;
    let horizon = 48; // one day ahead, half-hourly
    let (records, hierarchy) = synth::meter_fleet(seed, weeks).unwrap();
    let exogenous = synth::weather_exogenous(seed, weeks * 7 * 48 + horizon);

    // Inverse-error weighting in isolation.
    let weights = update_weights(&[0.42, 0.61, 1.8], 1e-6).unwrap();
    println!(
        "rolling MAEs [0.42, 0.61, 1.80] -> weights {:?}",
        weights
            .as_slice()
            .iter()
            .map(|w| (w * 1000.0).round() / 1000.0)
            .collect::<Vec<_>>()
    );

    // Backtest the pool on one meter.
    let cfg = BacktestConfig {
        window: 336,
        horizon,
        epsilon: 1e-6,
    };
    let mut pool: Vec<Box<dyn ForecastModel>> = vec![
        Box::new(EmaModel::new(0.3)),
        Box::new(SeasonalNaiveModel::new(48)),
        Box::new(LinearArModel::new(48)),
    ];
    let meter = &records[0];
    let result = backtest(&mut pool, &meter.series, Some(&exogenous), &cfg).unwrap();
    println!("\nbacktest of {}:", meter.meter_id);
    println!(
        "  ensemble mae {:.4}  (folds: {})",
        result.accuracy.mae,
        result.weight_trajectory.len()
    );
    for (model, acc) in pool.iter().zip(&result.per_model_accuracy) {
        println!("  {:16} mae {:.4}", model.name(), acc.mae);
    }
    let (origin, last) = result.weight_trajectory.last().unwrap();
    println!("  weights at fold {origin}: {last:?}");

    // Final day-ahead forecast per meter, blended with the last causal
    // weights, then aggregated to every level.
    let final_weights = enopt::forecast::EnsembleWeights::from_weights(last.clone()).unwrap();
    let mut forecasts = BTreeMap::new();
    for record in &records {
        let mut members = Vec::new();
        for model in pool.iter_mut() {
            model.fit(&record.series, Some(&exogenous)).unwrap();
            members.push(model.predict(horizon).unwrap());
        }
        forecasts.insert(
            record.meter_id.clone(),
            ensemble_forecast(&members, &final_weights).unwrap(),
        );
    }
    println!("\nbottom-up aggregation of the day-ahead forecast:");
    for level in [Level::Contract, Level::Sector, Level::District, Level::Portfolio] {
        let nodes = aggregate_bottom_up(&forecasts, &hierarchy, level).unwrap();
        let totals: Vec<String> = nodes
            .iter()
            .map(|(id, s)| format!("{id} {:.1} kWh", s.values().iter().sum::<f64>()))
            .collect();
        println!("  {level:?}: {}", totals.join(", "));
    }

    // Coherence: the portfolio equals the sum over any level, here checked
    // against the meters themselves.
    let portfolio = aggregate_bottom_up(&forecasts, &hierarchy, Level::Portfolio).unwrap();
    let direct: f64 = forecasts
        .values()
        .map(|s| s.values().iter().sum::<f64>())
        .sum();
    let rollup: f64 = portfolio["portfolio"].values().iter().sum();
    println!("\ncoherence: sum of meters {direct:.6} vs portfolio {rollup:.6}");
}
