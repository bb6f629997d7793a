//! Named tariff structures for scenario analysis.

use chrono::{Datelike, Timelike, Weekday};

use super::Tariff;
use crate::series::TimeSeries;
use crate::{Error, Result};

/// Peak window, local-free UTC hours: 16:00-19:00.
const PEAK: (u32, u32) = (16, 19);
/// Shoulder windows for the three-tier structure: 07:00-16:00, 19:00-22:00.
const SHOULDER_AM: (u32, u32) = (7, 16);
const SHOULDER_PM: (u32, u32) = (19, 22);

/// Builds the four standard tariff structures over the timeline of
/// `carbon`: flat, peak/off-peak, three-tier time-of-use, and weekday-only
/// peak. Peak steps are priced `base_price * peak_multiplier`; the
/// three-tier shoulder sits halfway at `base * (1 + multiplier) / 2`. With
/// a multiplier of 1 all four collapse to the flat tariff.
pub fn tariff_scenarios(
    base_price: f64,
    peak_multiplier: f64,
    export_price: f64,
    carbon: &TimeSeries,
    carbon_weight: f64,
) -> Result<Vec<(String, Tariff)>> {
    if peak_multiplier < 1.0 {
        return Err(Error::InvalidInput("peak multiplier must be at least 1".into()));
    }
    if base_price < 0.0 || export_price < 0.0 || carbon_weight < 0.0 {
        return Err(Error::InvalidInput("prices must be non-negative".into()));
    }
    carbon.dense()?;

    let peak_price = base_price * peak_multiplier;
    let shoulder_price = base_price * (1.0 + peak_multiplier) / 2.0;
    let in_window = |hour: u32, (lo, hi): (u32, u32)| (lo..hi).contains(&hour);

    let price_series = |f: &dyn Fn(u32, Weekday) -> f64| -> Result<TimeSeries> {
        let values: Vec<f64> = (0..carbon.len())
            .map(|t| {
                let ts = carbon.timestamp(t);
                f(ts.hour(), ts.weekday())
            })
            .collect();
        Ok(carbon.with_values(values)?.with_unit("£/kWh"))
    };
    let tariff = |import_price: TimeSeries| Tariff {
        import_price,
        export_price,
        carbon_intensity: carbon.clone(),
        carbon_weight,
    };

    Ok(vec![
        (
            "flat".to_string(),
            tariff(price_series(&|_, _| base_price)?),
        ),
        (
            "peak-offpeak".to_string(),
            tariff(price_series(&|h, _| {
                if in_window(h, PEAK) {
                    peak_price
                } else {
                    base_price
                }
            })?),
        ),
        (
            "three-tier".to_string(),
            tariff(price_series(&|h, _| {
                if in_window(h, PEAK) {
                    peak_price
                } else if in_window(h, SHOULDER_AM) || in_window(h, SHOULDER_PM) {
                    shoulder_price
                } else {
                    base_price
                }
            })?),
        ),
        (
            "weekday-peak".to_string(),
            tariff(price_series(&|h, wd| {
                let weekend = wd == Weekday::Sat || wd == Weekday::Sun;
                if !weekend && in_window(h, PEAK) {
                    peak_price
                } else {
                    base_price
                }
            })?),
        ),
    ])
}

#[cfg(test)]
mod tests {
    use chrono::{Duration, TimeZone, Utc};

    use super::*;

    fn hourly_carbon(start_day: u32, hours: usize) -> TimeSeries {
        let start = Utc.with_ymd_and_hms(2022, 1, start_day, 0, 0, 0).unwrap();
        TimeSeries::new(start, Duration::hours(1), vec![200.0; hours], "gCO2/kWh").unwrap()
    }

    #[test]
    fn unit_multiplier_collapses_to_flat() {
        let carbon = hourly_carbon(3, 48);
        let tariffs = tariff_scenarios(0.2, 1.0, 0.05, &carbon, 0.0).unwrap();
        let flat = &tariffs[0].1;
        for (name, t) in &tariffs {
            assert_eq!(
                t.import_price.values(),
                flat.import_price.values(),
                "{name} diverges at multiplier 1"
            );
        }
    }

    #[test]
    fn peak_window_hours_priced_up() {
        let carbon = hourly_carbon(3, 24);
        let tariffs = tariff_scenarios(0.2, 3.0, 0.05, &carbon, 0.0).unwrap();
        let peak = &tariffs[1].1.import_price;
        for h in 0..24 {
            let expected = if (16..19).contains(&h) { 0.6 } else { 0.2 };
            assert!((peak.value(h) - expected).abs() < 1e-12, "hour {h}");
        }
    }

    #[test]
    fn three_tier_shoulders() {
        let carbon = hourly_carbon(3, 24);
        let tariffs = tariff_scenarios(0.2, 3.0, 0.05, &carbon, 0.0).unwrap();
        let t = &tariffs[2].1.import_price;
        assert!((t.value(2) - 0.2).abs() < 1e-12); // overnight
        assert!((t.value(8) - 0.4).abs() < 1e-12); // morning shoulder
        assert!((t.value(17) - 0.6).abs() < 1e-12); // peak
        assert!((t.value(20) - 0.4).abs() < 1e-12); // evening shoulder
        assert!((t.value(23) - 0.2).abs() < 1e-12);
    }

    #[test]
    fn weekday_tariff_spares_saturday() {
        // 2022-01-01 is a Saturday.
        let carbon = hourly_carbon(1, 48);
        let tariffs = tariff_scenarios(0.2, 3.0, 0.05, &carbon, 0.0).unwrap();
        let t = &tariffs[3].1.import_price;
        for h in 0..24 {
            assert!((t.value(h) - 0.2).abs() < 1e-12, "saturday hour {h}");
        }
        // Sunday too.
        for h in 24..48 {
            assert!((t.value(h) - 0.2).abs() < 1e-12, "sunday hour {h}");
        }
    }
}
