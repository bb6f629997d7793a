//! The three dispatch strategies.

use super::{battery_step, BatterySpec, DispatchResult, Tariff};
use crate::milp::{
    solve_milp, LpProblem, MilpProblem, Sense, SolveOptions, Status, VarId, VarKind,
};
use crate::series::TimeSeries;
use crate::{Error, Result};

fn check_scenario(pv: &TimeSeries, load: &TimeSeries, tariff: &Tariff) -> Result<()> {
    pv.check_aligned(load, "load")?;
    pv.check_aligned(&tariff.import_price, "tariff")?;
    tariff.validate()?;
    pv.dense()?;
    load.dense()?;
    for (name, s) in [("PV", pv), ("load", load)] {
        if s.values().iter().any(|v| *v < 0.0) {
            return Err(Error::InvalidInput(format!("{name} series has negative energy")));
        }
    }
    Ok(())
}

/// Greedy rule: charge from PV surplus, discharge into deficit, both within
/// state-of-charge and power limits; leftovers are exported, shortfalls
/// imported.
pub fn baseline_dispatch(
    pv: &TimeSeries,
    load: &TimeSeries,
    spec: &BatterySpec,
    tariff: &Tariff,
) -> Result<DispatchResult> {
    check_scenario(pv, load, tariff)?;
    spec.validate()?;
    let n = pv.len();
    let dt = pv.resolution_hours();

    let mut charge = Vec::with_capacity(n);
    let mut discharge = Vec::with_capacity(n);
    let mut import = Vec::with_capacity(n);
    let mut export = Vec::with_capacity(n);
    let mut soc_trace = Vec::with_capacity(n);
    let mut soc = spec.initial_soc;
    for t in 0..n {
        let surplus = pv.value(t) - load.value(t);
        let (chg, dis) = if surplus >= 0.0 {
            (surplus.min(spec.charge_headroom(soc, dt)), 0.0)
        } else {
            (0.0, (-surplus).min(spec.discharge_available(soc, dt)))
        };
        soc = battery_step(soc, chg, dis, spec, dt)?;
        let net = surplus - chg + dis;
        charge.push(chg);
        discharge.push(dis);
        export.push(net.max(0.0));
        import.push((-net).max(0.0));
        soc_trace.push(soc);
    }
    DispatchResult::assemble(pv, tariff, spec, charge, discharge, import, export, soc_trace)
}

struct Layout {
    charge: Vec<VarId>,
    discharge: Vec<VarId>,
    import: Vec<VarId>,
    export: Vec<VarId>,
    grid_dir: Vec<VarId>,
    batt_dir: Vec<VarId>,
}

/// Self-consumption policy: the battery charges only from on-site surplus
/// and discharges only into on-site deficit; no grid arbitrage. An optional
/// peak threshold caps each step's import.
pub fn optimise_self_consumption(
    pv: &TimeSeries,
    load: &TimeSeries,
    spec: &BatterySpec,
    tariff: &Tariff,
    peak_threshold: Option<f64>,
    opts: &SolveOptions,
) -> Result<DispatchResult> {
    dispatch_milp(pv, load, spec, tariff, peak_threshold, true, opts)
}

/// Cost-based policy: free grid arbitrage under the tariff (with its
/// carbon weighting), subject to the state-of-charge window, power limits,
/// the optional cycle budget, and the optional peak threshold. Exclusivity
/// binaries forbid simultaneous charge/discharge and import/export.
pub fn optimise_cost(
    pv: &TimeSeries,
    load: &TimeSeries,
    spec: &BatterySpec,
    tariff: &Tariff,
    peak_threshold: Option<f64>,
    opts: &SolveOptions,
) -> Result<DispatchResult> {
    dispatch_milp(pv, load, spec, tariff, peak_threshold, false, opts)
}

/// Builds the dispatch problem. Without `with_binaries` the exclusivity
/// binaries are left out, giving the plain LP relaxation.
#[allow(clippy::too_many_arguments)]
fn build_dispatch(
    pv: &TimeSeries,
    load: &TimeSeries,
    spec: &BatterySpec,
    tariff: &Tariff,
    peak_threshold: Option<f64>,
    self_consumption: bool,
    with_binaries: bool,
) -> (MilpProblem, Layout) {
    let n = pv.len();
    let dt = pv.resolution_hours();
    let step_cap = spec.p_max * dt;
    let soc_unit = 100.0 / spec.e_cap;

    let max_load = load.values().iter().cloned().fold(0.0f64, f64::max);
    let max_pv = pv.values().iter().cloned().fold(0.0f64, f64::max);
    let big_import = max_load + step_cap + 1.0;
    let big_export = max_pv + step_cap + 1.0;

    let mut lp = LpProblem::new(Sense::Minimize);
    let mut layout = Layout {
        charge: Vec::with_capacity(n),
        discharge: Vec::with_capacity(n),
        import: Vec::with_capacity(n),
        export: Vec::with_capacity(n),
        grid_dir: Vec::new(),
        batt_dir: Vec::new(),
    };
    let mut soc_vars = Vec::with_capacity(n);

    for t in 0..n {
        let surplus = (pv.value(t) - load.value(t)).max(0.0);
        let deficit = (load.value(t) - pv.value(t)).max(0.0);
        let (chg_cap, dis_cap) = if self_consumption {
            (step_cap.min(surplus), step_cap.min(deficit))
        } else {
            (step_cap, step_cap)
        };
        layout
            .charge
            .push(lp.add_var(format!("charge_{t}"), 0.0, chg_cap, 0.0));
        layout
            .discharge
            .push(lp.add_var(format!("discharge_{t}"), 0.0, dis_cap, 0.0));
        let import_cap = peak_threshold.unwrap_or(f64::INFINITY);
        layout.import.push(lp.add_var(
            format!("import_{t}"),
            0.0,
            import_cap,
            tariff.import_price.value(t)
                + tariff.carbon_weight * tariff.carbon_intensity.value(t),
        ));
        // Exports are bounded even in the relaxation, so a tariff paying
        // more for export than import cannot ride to infinity.
        layout.export.push(lp.add_var(
            format!("export_{t}"),
            0.0,
            big_export,
            -tariff.export_price,
        ));
        soc_vars.push(lp.add_var(format!("soc_{t}"), spec.soc_min, spec.soc_max, 0.0));
        if with_binaries {
            layout
                .grid_dir
                .push(lp.add_var(format!("grid_dir_{t}"), 0.0, 1.0, 0.0));
            if !self_consumption {
                layout
                    .batt_dir
                    .push(lp.add_var(format!("batt_dir_{t}"), 0.0, 1.0, 0.0));
            }
        }
    }

    for t in 0..n {
        // Energy balance: load = pv + import - export + discharge - charge.
        lp.add_eq(
            vec![
                (layout.import[t], 1.0),
                (layout.export[t], -1.0),
                (layout.discharge[t], 1.0),
                (layout.charge[t], -1.0),
            ],
            load.value(t) - pv.value(t),
        );
        // State of charge chain.
        let mut terms = vec![
            (soc_vars[t], 1.0),
            (layout.charge[t], -spec.eta_c * soc_unit),
            (layout.discharge[t], soc_unit / spec.eta_d),
        ];
        let rhs = if t == 0 {
            spec.initial_soc
        } else {
            terms.push((soc_vars[t - 1], -1.0));
            0.0
        };
        lp.add_eq(terms, rhs);
        if with_binaries {
            // Import/export exclusivity.
            lp.add_le(
                vec![(layout.import[t], 1.0), (layout.grid_dir[t], -big_import)],
                0.0,
            );
            lp.add_le(
                vec![(layout.export[t], 1.0), (layout.grid_dir[t], big_export)],
                big_export,
            );
            // Charge/discharge exclusivity (implied by the surplus/deficit
            // caps in self-consumption mode).
            if !self_consumption {
                lp.add_le(
                    vec![(layout.charge[t], 1.0), (layout.batt_dir[t], -step_cap)],
                    0.0,
                );
                lp.add_le(
                    vec![(layout.discharge[t], 1.0), (layout.batt_dir[t], step_cap)],
                    step_cap,
                );
            }
        }
    }
    if let Some(limit) = spec.cycle_limit {
        let mut terms: Vec<(VarId, f64)> = Vec::with_capacity(2 * n);
        for t in 0..n {
            terms.push((layout.charge[t], 1.0));
            terms.push((layout.discharge[t], 1.0));
        }
        lp.add_le(terms, 2.0 * spec.e_cap * limit);
    }

    let mut problem = MilpProblem::from_lp(lp);
    if with_binaries {
        for t in 0..n {
            problem.set_kind(layout.grid_dir[t], VarKind::Binary);
            if !self_consumption {
                problem.set_kind(layout.batt_dir[t], VarKind::Binary);
            }
        }
    }
    (problem, layout)
}

#[allow(clippy::too_many_arguments)]
fn dispatch_milp(
    pv: &TimeSeries,
    load: &TimeSeries,
    spec: &BatterySpec,
    tariff: &Tariff,
    peak_threshold: Option<f64>,
    self_consumption: bool,
    opts: &SolveOptions,
) -> Result<DispatchResult> {
    check_scenario(pv, load, tariff)?;
    spec.validate()?;
    if let Some(th) = peak_threshold {
        if th < 0.0 {
            return Err(Error::InvalidInput("peak threshold must be non-negative".into()));
        }
    }
    let n = pv.len();
    let dt = pv.resolution_hours();

    // Two-tier solve. The exclusivity binaries carry no cost of their own:
    // whenever the plain relaxation already satisfies per-step
    // complementarity, it is feasible for (and therefore optimal in) the
    // binary problem, and branching over hundreds of cost-free indicators
    // is wasted work. Only an audit failure (e.g. export priced above
    // import) brings the binaries in.
    let (relaxed, layout) = build_dispatch(
        pv,
        load,
        spec,
        tariff,
        peak_threshold,
        self_consumption,
        false,
    );
    let relaxed_solution = solve_milp(&relaxed, opts)?;
    let complementary = |sol: &crate::milp::Solution| {
        (0..n).all(|t| {
            let imp = sol.value(layout.import[t]);
            let exp = sol.value(layout.export[t]);
            let chg = sol.value(layout.charge[t]);
            let dis = sol.value(layout.discharge[t]);
            imp.min(exp) <= 1e-9 && chg.min(dis) <= 1e-9
        })
    };

    let (solution, layout) = match relaxed_solution.status {
        Status::Optimal | Status::GapLimit if complementary(&relaxed_solution) => {
            (relaxed_solution, layout)
        }
        Status::Infeasible => {
            return Err(diagnose_peak_infeasibility(
                pv,
                load,
                spec,
                peak_threshold,
                self_consumption,
            ))
        }
        Status::IterationLimit => {
            return Err(Error::SolverLimit("dispatch relaxation stalled".into()))
        }
        // Complementarity violated or relaxation unbounded: enforce the
        // exclusivity binaries and pay for the tree search.
        _ => {
            let (problem, layout) = build_dispatch(
                pv,
                load,
                spec,
                tariff,
                peak_threshold,
                self_consumption,
                true,
            );
            let solution = solve_milp(&problem, opts)?;
            match solution.status {
                Status::Optimal | Status::GapLimit => (solution, layout),
                Status::Infeasible => {
                    return Err(diagnose_peak_infeasibility(
                        pv,
                        load,
                        spec,
                        peak_threshold,
                        self_consumption,
                    ))
                }
                other => {
                    return Err(Error::SolverLimit(format!(
                        "dispatch stopped with {other:?}"
                    )))
                }
            }
        }
    };
    let with_binaries = !layout.grid_dir.is_empty();

    // Decode: take the battery flows (zeroing the side its binary switched
    // off), rebuild the state of charge exactly through the twin, and
    // recover import/export from the energy balance so the balance is
    // exact and the grid complementarity strict.
    let mut charge = Vec::with_capacity(n);
    let mut discharge = Vec::with_capacity(n);
    let mut import = Vec::with_capacity(n);
    let mut export = Vec::with_capacity(n);
    let mut soc_trace = Vec::with_capacity(n);
    let mut soc = spec.initial_soc;
    for t in 0..n {
        let mut chg = solution.value(layout.charge[t]).max(0.0);
        let mut dis = solution.value(layout.discharge[t]).max(0.0);
        if with_binaries && !self_consumption {
            if solution.value(layout.batt_dir[t]) > 0.5 {
                dis = 0.0;
            } else {
                chg = 0.0;
            }
        }
        if chg <= 1e-9 {
            chg = 0.0;
        }
        if dis <= 1e-9 {
            dis = 0.0;
        }
        soc = battery_step(soc, chg, dis, spec, dt)?;
        let net = load.value(t) - pv.value(t) - dis + chg;
        import.push(net.max(0.0));
        export.push((-net).max(0.0));
        charge.push(chg);
        discharge.push(dis);
        soc_trace.push(soc);
    }
    DispatchResult::assemble(pv, tariff, spec, charge, discharge, import, export, soc_trace)
}

/// Names the first step at which the peak threshold is provably
/// unattainable, falling back to a generic message when the shortfall is a
/// cumulative energy effect.
fn diagnose_peak_infeasibility(
    pv: &TimeSeries,
    load: &TimeSeries,
    spec: &BatterySpec,
    peak_threshold: Option<f64>,
    self_consumption: bool,
) -> Error {
    let dt = pv.resolution_hours();
    if let Some(th) = peak_threshold {
        let full_energy =
            (spec.soc_max - spec.soc_min) * spec.e_cap * spec.eta_d / 100.0;
        let best_dis = (spec.p_max * dt).min(full_energy);
        for t in 0..pv.len() {
            let deficit = load.value(t) - pv.value(t);
            if deficit - best_dis > th + 1e-12 {
                return Error::Infeasible(format!(
                    "peak threshold {th} kWh/step unattainable at step {t}: deficit \
                     {deficit:.3} kWh exceeds threshold plus battery capability {best_dis:.3}"
                ));
            }
        }
        return Error::Infeasible(format!(
            "peak threshold {th} kWh/step unattainable: the battery's energy runs out \
             before some step{}",
            if self_consumption {
                " (self-consumption forbids grid recharge)"
            } else {
                ""
            }
        ));
    }
    Error::Infeasible("dispatch problem has no feasible point".into())
}

#[cfg(test)]
mod tests {
    use chrono::Duration;

    use super::*;
    use crate::series::t0;

    fn series(values: Vec<f64>) -> TimeSeries {
        TimeSeries::new(t0(), Duration::minutes(30), values, "kWh").unwrap()
    }

    fn spec() -> BatterySpec {
        BatterySpec {
            e_cap: 100.0,
            soc_min: 10.0,
            soc_max: 90.0,
            p_max: 40.0,
            eta_c: 0.95,
            eta_d: 0.95,
            cycle_limit: None,
            initial_soc: 50.0,
        }
    }

    fn flat_tariff(n: usize, price: f64, export: f64) -> Tariff {
        Tariff {
            import_price: series(vec![price; n]).with_unit("£/kWh"),
            export_price: export,
            carbon_intensity: series(vec![200.0; n]).with_unit("gCO2/kWh"),
            carbon_weight: 0.0,
        }
    }

    fn opts() -> SolveOptions {
        SolveOptions {
            rel_gap: 1e-9,
            ..SolveOptions::default()
        }
    }

    #[test]
    fn balanced_site_idles() {
        let pv = series(vec![3.0; 4]);
        let load = series(vec![3.0; 4]);
        let r = baseline_dispatch(&pv, &load, &spec(), &flat_tariff(4, 0.3, 0.05)).unwrap();
        assert!(r.charge.values().iter().all(|v| *v == 0.0));
        assert!(r.import.values().iter().all(|v| *v == 0.0));
        assert!(r.export.values().iter().all(|v| *v == 0.0));
        assert_eq!(r.cycles, 0.0);
    }

    #[test]
    fn surplus_charges_before_exporting() {
        let pv = series(vec![8.0]);
        let load = series(vec![3.0]);
        let r = baseline_dispatch(&pv, &load, &spec(), &flat_tariff(1, 0.3, 0.05)).unwrap();
        assert!((r.charge.value(0) - 5.0).abs() < 1e-12);
        assert_eq!(r.export.value(0), 0.0);
        assert!((r.soc.value(0) - (50.0 + 0.95 * 5.0)).abs() < 1e-12);
    }

    #[test]
    fn full_battery_exports_surplus() {
        let mut s = spec();
        s.initial_soc = 90.0;
        let pv = series(vec![8.0]);
        let load = series(vec![3.0]);
        let r = baseline_dispatch(&pv, &load, &s, &flat_tariff(1, 0.3, 0.05)).unwrap();
        assert_eq!(r.charge.value(0), 0.0);
        assert!((r.export.value(0) - 5.0).abs() < 1e-12);
    }

    #[test]
    fn self_consumption_without_pv_never_charges() {
        let pv = series(vec![0.0; 6]);
        let load = series(vec![4.0; 6]);
        let tariff = flat_tariff(6, 0.3, 0.05);
        let r =
            optimise_self_consumption(&pv, &load, &spec(), &tariff, None, &opts()).unwrap();
        assert!(r.charge.values().iter().all(|v| *v == 0.0));
        // The battery may still serve load from its initial charge; with a
        // flat price that is cost-neutral at best, but imports must cover
        // whatever remains.
        for t in 0..6 {
            let balance =
                r.import.value(t) - r.export.value(t) + r.discharge.value(t) - 4.0;
            assert!(balance.abs() < 1e-9);
        }
    }

    #[test]
    fn self_consumption_beats_baseline() {
        // Midday surplus, evening deficit, expensive evening import.
        let pv = series(vec![0.0, 6.0, 8.0, 1.0, 0.0, 0.0]);
        let load = series(vec![2.0, 2.0, 2.0, 3.0, 6.0, 6.0]);
        let tariff = Tariff {
            import_price: series(vec![0.15, 0.15, 0.15, 0.2, 0.4, 0.4]).with_unit("£/kWh"),
            export_price: 0.05,
            carbon_intensity: series(vec![200.0; 6]).with_unit("gCO2/kWh"),
            carbon_weight: 0.0,
        };
        let base = baseline_dispatch(&pv, &load, &spec(), &tariff).unwrap();
        let sc =
            optimise_self_consumption(&pv, &load, &spec(), &tariff, None, &opts()).unwrap();
        assert!(
            sc.cost <= base.cost + 1e-9,
            "self-consumption {} vs baseline {}",
            sc.cost,
            base.cost
        );
    }

    #[test]
    fn peak_threshold_respected_and_matches_enumeration() {
        // Evening peak deficit with no PV: only discharge can shave it.
        let pv = series(vec![0.0; 4]);
        let load = series(vec![2.0, 2.0, 12.0, 12.0]);
        let tariff = flat_tariff(4, 0.3, 0.0);
        let th = 5.0;
        let r = optimise_self_consumption(&pv, &load, &spec(), &tariff, Some(th), &opts())
            .unwrap();
        for t in 0..4 {
            assert!(r.import.value(t) <= th + 1e-9, "step {t}");
        }
        // Exhaustive search over discharge grids (charge is forced to zero
        // without surplus): 0.5 kWh steps up to the per-interval cap.
        let mut best = f64::INFINITY;
        let steps: Vec<f64> = (0..=40).map(|i| i as f64 * 0.5).collect();
        for &d0 in &steps {
            for &d1 in &steps {
                for &d2 in &steps {
                    for &d3 in &steps {
                        let dis = [d0, d1, d2, d3];
                        let mut soc = 50.0;
                        let mut cost = 0.0;
                        let mut ok = true;
                        for t in 0..4 {
                            if dis[t] > load.value(t) {
                                ok = false;
                                break;
                            }
                            match battery_step(soc, 0.0, dis[t], &spec(), 0.5) {
                                Ok(s) => soc = s,
                                Err(_) => {
                                    ok = false;
                                    break;
                                }
                            }
                            let imp = load.value(t) - dis[t];
                            if imp > th + 1e-12 {
                                ok = false;
                                break;
                            }
                            cost += 0.3 * imp;
                        }
                        if ok {
                            best = best.min(cost);
                        }
                    }
                }
            }
        }
        assert!(
            r.cost <= best + 1e-6,
            "milp {} vs enumeration {}",
            r.cost,
            best
        );
    }

    #[test]
    fn unattainable_peak_threshold_names_step() {
        let pv = series(vec![0.0; 3]);
        let load = series(vec![2.0, 60.0, 2.0]);
        let tariff = flat_tariff(3, 0.3, 0.0);
        match optimise_cost(&pv, &load, &spec(), &tariff, Some(5.0), &opts()) {
            Err(Error::Infeasible(msg)) => assert!(msg.contains("step 1"), "{msg}"),
            other => panic!("expected infeasibility, got {other:?}"),
        }
    }

    #[test]
    fn flat_tariff_keeps_battery_idle() {
        // With the battery starting empty (no free stored energy) and a
        // flat tariff, round-trip losses make any movement strictly
        // unprofitable; check against exhaustive enumeration on 3 steps.
        let mut s = spec();
        s.initial_soc = s.soc_min;
        let pv = series(vec![0.0; 3]);
        let load = series(vec![5.0; 3]);
        let tariff = flat_tariff(3, 0.25, 0.05);
        let r = optimise_cost(&pv, &load, &s, &tariff, None, &opts()).unwrap();
        assert!(r.cycles < 1e-9, "battery moved: {} cycles", r.cycles);
        let grid: Vec<f64> = (0..=8).map(|i| i as f64 * 2.5).collect();
        let mut best = f64::INFINITY;
        for &c0 in &grid {
            for &d0 in &grid {
                for &c1 in &grid {
                    for &d1 in &grid {
                        for &c2 in &grid {
                            for &d2 in &grid {
                                let chg = [c0, c1, c2];
                                let dis = [d0, d1, d2];
                                let mut soc = s.initial_soc;
                                let mut cost = 0.0;
                                let mut ok = true;
                                for t in 0..3 {
                                    if chg[t] > 0.0 && dis[t] > 0.0 {
                                        ok = false;
                                        break;
                                    }
                                    match battery_step(soc, chg[t], dis[t], &s, 0.5) {
                                        Ok(v) => soc = v,
                                        Err(_) => {
                                            ok = false;
                                            break;
                                        }
                                    }
                                    let net = 5.0 - dis[t] + chg[t];
                                    cost += 0.25 * net.max(0.0) - 0.05 * (-net).max(0.0);
                                }
                                if ok {
                                    best = best.min(cost);
                                }
                            }
                        }
                    }
                }
            }
        }
        assert!((r.cost - best).abs() < 1e-6, "milp {} vs grid {}", r.cost, best);
    }

    #[test]
    fn time_of_use_arbitrage_beats_self_consumption() {
        // 0.10 off-peak, 0.30 peak, round trip 0.9: charging a kWh costs
        // 0.10/0.9025 ≈ 0.111 per delivered kWh against 0.30 imported.
        // The battery starts empty so only genuine arbitrage separates the
        // strategies.
        let mut s = spec();
        s.initial_soc = s.soc_min;
        let pv = series(vec![0.0; 6]);
        let load = series(vec![4.0; 6]);
        let tariff = Tariff {
            import_price: series(vec![0.1, 0.1, 0.1, 0.3, 0.3, 0.3]).with_unit("£/kWh"),
            export_price: 0.0,
            carbon_intensity: series(vec![200.0; 6]).with_unit("gCO2/kWh"),
            carbon_weight: 0.0,
        };
        let cost = optimise_cost(&pv, &load, &s, &tariff, None, &opts()).unwrap();
        let sc = optimise_self_consumption(&pv, &load, &s, &tariff, None, &opts()).unwrap();
        assert!(
            cost.cost < sc.cost - 1e-6,
            "arbitrage {} vs self-consumption {}",
            cost.cost,
            sc.cost
        );
        // Off-peak steps charge, peak steps discharge.
        let charged: f64 = (0..3).map(|t| cost.charge.value(t)).sum();
        let discharged: f64 = (3..6).map(|t| cost.discharge.value(t)).sum();
        assert!(charged > 1.0, "no off-peak charging");
        assert!(discharged > 1.0, "no peak discharging");
    }

    #[test]
    fn zero_cycle_limit_freezes_battery() {
        let mut s = spec();
        s.cycle_limit = Some(0.0);
        let pv = series(vec![0.0; 4]);
        let load = series(vec![4.0; 4]);
        let tariff = Tariff {
            import_price: series(vec![0.1, 0.1, 0.4, 0.4]).with_unit("£/kWh"),
            export_price: 0.0,
            carbon_intensity: series(vec![200.0; 4]).with_unit("gCO2/kWh"),
            carbon_weight: 0.0,
        };
        let r = optimise_cost(&pv, &load, &s, &tariff, None, &opts()).unwrap();
        assert_eq!(r.cycles, 0.0);
        for t in 0..4 {
            assert!((r.import.value(t) - 4.0).abs() < 1e-9);
        }
    }

    #[test]
    fn exclusivity_survives_generous_export() {
        // Export priced above import would invite simultaneous import and
        // export without the binaries.
        let pv = series(vec![2.0; 4]);
        let load = series(vec![2.0; 4]);
        let tariff = flat_tariff(4, 0.1, 0.5);
        let r = optimise_cost(&pv, &load, &spec(), &tariff, None, &opts()).unwrap();
        for t in 0..4 {
            assert!(
                r.import.value(t) == 0.0 || r.export.value(t) == 0.0,
                "simultaneous import/export at {t}"
            );
            assert!(
                r.charge.value(t) == 0.0 || r.discharge.value(t) == 0.0,
                "simultaneous charge/discharge at {t}"
            );
        }
    }
}
