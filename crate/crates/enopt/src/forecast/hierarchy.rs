//! Meter → contract → sector → district → portfolio aggregation.
//!
//! Aggregates are built parent-from-children in sorted id order, so a
//! parent series is exactly the sum of its child series by construction
//! (coherent at every level).

use std::collections::BTreeMap;

use crate::series::TimeSeries;
use crate::{Error, Result};

/// Aggregation levels from finest to coarsest.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Meter,
    Contract,
    Sector,
    District,
    Portfolio,
}

/// Child-to-parent mappings per level. Every meter must resolve to the
/// single portfolio root through the chain.
#[derive(Debug, Clone, Default)]
pub struct Hierarchy {
    pub meter_to_contract: BTreeMap<String, String>,
    pub contract_to_sector: BTreeMap<String, String>,
    pub sector_to_district: BTreeMap<String, String>,
    pub district_to_portfolio: BTreeMap<String, String>,
}

impl Hierarchy {
    pub fn validate(&self) -> Result<()> {
        if self.meter_to_contract.is_empty() {
            return Err(Error::InvalidInput("hierarchy has no meters".into()));
        }
        for (meter, contract) in &self.meter_to_contract {
            let sector = self.contract_to_sector.get(contract).ok_or_else(|| {
                Error::InvalidInput(format!(
                    "contract '{contract}' of meter '{meter}' has no sector"
                ))
            })?;
            let district = self.sector_to_district.get(sector).ok_or_else(|| {
                Error::InvalidInput(format!("sector '{sector}' has no district"))
            })?;
            self.district_to_portfolio.get(district).ok_or_else(|| {
                Error::InvalidInput(format!("district '{district}' has no portfolio"))
            })?;
        }
        let mut roots: Vec<&String> = self.district_to_portfolio.values().collect();
        roots.sort();
        roots.dedup();
        if roots.len() != 1 {
            return Err(Error::InvalidInput(format!(
                "expected a single portfolio root, found {}",
                roots.len()
            )));
        }
        Ok(())
    }

    pub fn portfolio_id(&self) -> Result<&str> {
        self.district_to_portfolio
            .values()
            .next()
            .map(|s| s.as_str())
            .ok_or_else(|| Error::InvalidInput("hierarchy has no districts".into()))
    }
}

/// Sums per-meter forecasts up to `level`. Each node's series is the sum of
/// its children's series; summation order is the sorted child id order, so
/// repeated runs are bit-identical.
pub fn aggregate_bottom_up(
    forecasts: &BTreeMap<String, TimeSeries>,
    hierarchy: &Hierarchy,
    level: Level,
) -> Result<BTreeMap<String, TimeSeries>> {
    hierarchy.validate()?;
    if forecasts.is_empty() {
        return Err(Error::InvalidInput("no meter forecasts".into()));
    }
    for meter in forecasts.keys() {
        if !hierarchy.meter_to_contract.contains_key(meter) {
            return Err(Error::InvalidInput(format!(
                "meter '{meter}' missing from hierarchy"
            )));
        }
    }
    for meter in hierarchy.meter_to_contract.keys() {
        if !forecasts.contains_key(meter) {
            return Err(Error::InvalidInput(format!(
                "no forecast for meter '{meter}'"
            )));
        }
    }
    if level == Level::Meter {
        return Ok(forecasts.clone());
    }

    let contracts = sum_by(forecasts, &hierarchy.meter_to_contract)?;
    if level == Level::Contract {
        return Ok(contracts);
    }
    let sectors = sum_by(&contracts, &hierarchy.contract_to_sector)?;
    if level == Level::Sector {
        return Ok(sectors);
    }
    let districts = sum_by(&sectors, &hierarchy.sector_to_district)?;
    if level == Level::District {
        return Ok(districts);
    }
    sum_by(&districts, &hierarchy.district_to_portfolio)
}

fn sum_by(
    children: &BTreeMap<String, TimeSeries>,
    parent_of: &BTreeMap<String, String>,
) -> Result<BTreeMap<String, TimeSeries>> {
    let mut out: BTreeMap<String, TimeSeries> = BTreeMap::new();
    // BTreeMap iteration is sorted by child id: deterministic sum order.
    for (child, series) in children {
        let parent = parent_of
            .get(child)
            .ok_or_else(|| Error::InvalidInput(format!("node '{child}' has no parent")))?;
        match out.get_mut(parent) {
            None => {
                out.insert(parent.clone(), series.clone());
            }
            Some(acc) => {
                acc.check_aligned(series, "aggregate")?;
                let values: Vec<f64> = acc
                    .values()
                    .iter()
                    .zip(series.values())
                    .map(|(a, b)| a + b)
                    .collect();
                *acc = acc.with_values(values)?;
            }
        }
    }
    Ok(out)
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

    fn two_meter_hierarchy() -> Hierarchy {
        let mut h = Hierarchy::default();
        h.meter_to_contract.insert("m1".into(), "c1".into());
        h.meter_to_contract.insert("m2".into(), "c1".into());
        h.contract_to_sector.insert("c1".into(), "s1".into());
        h.sector_to_district.insert("s1".into(), "d1".into());
        h.district_to_portfolio.insert("d1".into(), "portfolio".into());
        h
    }

    #[test]
    fn contract_is_sum_of_meters() {
        let mut forecasts = BTreeMap::new();
        forecasts.insert("m1".to_string(), series(vec![1.0, 2.0]));
        forecasts.insert("m2".to_string(), series(vec![3.0, 4.0]));
        let h = two_meter_hierarchy();
        let contracts = aggregate_bottom_up(&forecasts, &h, Level::Contract).unwrap();
        assert_eq!(contracts["c1"].values(), &[4.0, 6.0]);
        let portfolio = aggregate_bottom_up(&forecasts, &h, Level::Portfolio).unwrap();
        assert_eq!(portfolio["portfolio"].values(), &[4.0, 6.0]);
    }

    #[test]
    fn missing_meter_is_an_error() {
        let mut forecasts = BTreeMap::new();
        forecasts.insert("m1".to_string(), series(vec![1.0]));
        forecasts.insert("ghost".to_string(), series(vec![1.0]));
        let h = two_meter_hierarchy();
        assert!(aggregate_bottom_up(&forecasts, &h, Level::Contract).is_err());
    }

    #[test]
    fn coherent_at_every_level() {
        // Random hierarchy over a dyadic value grid (multiples of 1/1024),
        // where float sums are exact in any order.
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mut h = Hierarchy::default();
        let mut forecasts = BTreeMap::new();
        for d in 0..2 {
            h.district_to_portfolio
                .insert(format!("d{d}"), "root".into());
            for s in 0..2 {
                let sector = format!("d{d}s{s}");
                h.sector_to_district.insert(sector.clone(), format!("d{d}"));
                for c in 0..2 {
                    let contract = format!("{sector}c{c}");
                    h.contract_to_sector.insert(contract.clone(), sector.clone());
                    for m in 0..3 {
                        let meter = format!("{contract}m{m}");
                        h.meter_to_contract.insert(meter.clone(), contract.clone());
                        let values: Vec<f64> = (0..6)
                            .map(|_| rng.gen_range(0..4096) as f64 / 1024.0)
                            .collect();
                        forecasts.insert(meter, series(values));
                    }
                }
            }
        }

        let contracts = aggregate_bottom_up(&forecasts, &h, Level::Contract).unwrap();
        let sectors = aggregate_bottom_up(&forecasts, &h, Level::Sector).unwrap();
        let districts = aggregate_bottom_up(&forecasts, &h, Level::District).unwrap();
        let portfolio = aggregate_bottom_up(&forecasts, &h, Level::Portfolio).unwrap();

        // Parent equals the sum of its children, bit for bit.
        for (sector, s_series) in &sectors {
            let mut acc = vec![0.0; 6];
            for (contract, c_series) in &contracts {
                if h.contract_to_sector[contract] == *sector {
                    for (a, v) in acc.iter_mut().zip(c_series.values()) {
                        *a += v;
                    }
                }
            }
            assert_eq!(acc.as_slice(), s_series.values());
        }
        // Flat sums across any level reproduce the portfolio exactly on
        // the dyadic grid.
        for level_map in [&contracts, &sectors, &districts] {
            let mut acc = vec![0.0; 6];
            for s in level_map.values() {
                for (a, v) in acc.iter_mut().zip(s.values()) {
                    *a += v;
                }
            }
            assert_eq!(acc.as_slice(), portfolio["root"].values());
        }
    }
}
