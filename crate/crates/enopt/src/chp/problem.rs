//! MILP construction and the optimised dispatch path.

use super::{
    schedule_from_steps, DispatchStep, NetworkScenario, NetworkSchedule, SiteAssets,
};
use crate::milp::{
    solve_milp, LpProblem, MilpProblem, Sense, SolveOptions, Status, VarId, VarKind,
};
use crate::{Error, Result};

/// Per-step variable handles, in declaration order.
pub(crate) struct Layout {
    pub on: Vec<VarId>,
    pub restart: Vec<VarId>,
    pub load: Vec<VarId>,
    pub e_import: Vec<VarId>,
    pub e_export: Vec<VarId>,
    pub q_boiler: Vec<VarId>,
    pub q_charge: Vec<VarId>,
    pub q_discharge: Vec<VarId>,
    pub soe: Vec<VarId>,
}

/// Builds the scheduling MILP: per step an on/off binary `S`, a restart
/// binary `R` with `R >= S(t) - S(t-1)`, a load fraction tied to `S` by the
/// minimum-load window, grid import/export, boiler output, store charge and
/// discharge, and the store's state of energy chained by an equality.
/// Electricity and heat balances hold per step, export is capped by CHP
/// output, and restarts are capped per UTC day.
pub fn build_problem(scenario: &NetworkScenario, assets: &SiteAssets) -> Result<MilpProblem> {
    Ok(build(scenario, assets)?.0)
}

pub(crate) fn build(
    scenario: &NetworkScenario,
    assets: &SiteAssets,
) -> Result<(MilpProblem, Layout)> {
    scenario.validate()?;
    assets.validate()?;
    let n = scenario.len();
    let dt = scenario.dt_hours();
    let chp = &assets.chp;
    let boiler = &assets.boiler;
    let art = &scenario.artificial;

    let (chg_max, dis_max, soe_bounds, soe_init) = match &assets.store {
        Some(s) => (
            s.max_charge_rate,
            s.max_discharge_rate,
            (s.min_level, s.capacity),
            s.initial_soe,
        ),
        None => (0.0, 0.0, (0.0, 0.0), 0.0),
    };

    let mut lp = LpProblem::new(Sense::Minimize);
    let mut layout = Layout {
        on: Vec::with_capacity(n),
        restart: Vec::with_capacity(n),
        load: Vec::with_capacity(n),
        e_import: Vec::with_capacity(n),
        e_export: Vec::with_capacity(n),
        q_boiler: Vec::with_capacity(n),
        q_charge: Vec::with_capacity(n),
        q_discharge: Vec::with_capacity(n),
        soe: Vec::with_capacity(n),
    };

    for t in 0..n {
        let gas_price = scenario.gas_price.value(t);
        layout.on.push(lp.add_var(
            format!("on_{t}"),
            0.0,
            1.0,
            chp.maintenance_cost_per_hour * dt,
        ));
        layout
            .restart
            .push(lp.add_var(format!("restart_{t}"), 0.0, 1.0, art.restart));
        // Gas for electricity plus the CHP heat preference, both scale
        // with load.
        layout.load.push(lp.add_var(
            format!("load_{t}"),
            0.0,
            1.0,
            (chp.elec_capacity * chp.gas_per_elec * gas_price
                + art.chp_pref * chp.heat_capacity)
                * dt,
        ));
        layout.e_import.push(lp.add_var(
            format!("import_{t}"),
            0.0,
            f64::INFINITY,
            (scenario.import_price.value(t) + art.import_pref) * dt,
        ));
        layout.e_export.push(lp.add_var(
            format!("export_{t}"),
            0.0,
            f64::INFINITY,
            -scenario.export_price.value(t) * dt,
        ));
        layout.q_boiler.push(lp.add_var(
            format!("boiler_{t}"),
            0.0,
            boiler.heat_capacity,
            (gas_price / boiler.efficiency + art.boiler_pref) * dt,
        ));
        layout
            .q_charge
            .push(lp.add_var(format!("charge_{t}"), 0.0, chg_max, 0.0));
        layout
            .q_discharge
            .push(lp.add_var(format!("discharge_{t}"), 0.0, dis_max, 0.0));
        layout
            .soe
            .push(lp.add_var(format!("soe_{t}"), soe_bounds.0, soe_bounds.1, 0.0));
    }

    for t in 0..n {
        // Load window: min_load * S <= load <= S.
        lp.add_le(vec![(layout.load[t], 1.0), (layout.on[t], -1.0)], 0.0);
        lp.add_ge(
            vec![
                (layout.load[t], 1.0),
                (layout.on[t], -chp.min_load_fraction),
            ],
            0.0,
        );
        // Restart detection: R(t) >= S(t) - S(t-1).
        if t == 0 {
            let initial = if scenario.chp_initially_on { 1.0 } else { 0.0 };
            lp.add_le(
                vec![(layout.on[t], 1.0), (layout.restart[t], -1.0)],
                initial,
            );
        } else {
            lp.add_le(
                vec![
                    (layout.on[t], 1.0),
                    (layout.on[t - 1], -1.0),
                    (layout.restart[t], -1.0),
                ],
                0.0,
            );
        }
        // Electricity balance: E_CHP + import - export = demand.
        lp.add_eq(
            vec![
                (layout.load[t], chp.elec_capacity),
                (layout.e_import[t], 1.0),
                (layout.e_export[t], -1.0),
            ],
            scenario.elec_demand.value(t),
        );
        // Heat balance: Q_CHP + boiler + discharge - charge = demand.
        lp.add_eq(
            vec![
                (layout.load[t], chp.heat_capacity),
                (layout.q_boiler[t], 1.0),
                (layout.q_discharge[t], 1.0),
                (layout.q_charge[t], -1.0),
            ],
            scenario.heat_demand.value(t),
        );
        // Export no greater than CHP generation.
        lp.add_le(
            vec![
                (layout.e_export[t], 1.0),
                (layout.load[t], -chp.elec_capacity),
            ],
            0.0,
        );
        // Store state of energy: SOE(t) = SOE(t-1) + (charge - discharge)*dt.
        let mut terms = vec![
            (layout.soe[t], 1.0),
            (layout.q_charge[t], -dt),
            (layout.q_discharge[t], dt),
        ];
        let rhs = if t == 0 {
            soe_init
        } else {
            terms.push((layout.soe[t - 1], -1.0));
            0.0
        };
        lp.add_eq(terms, rhs);
    }

    // Daily restart caps.
    for (_, idx) in scenario.day_groups() {
        let terms: Vec<(VarId, f64)> = idx.iter().map(|&t| (layout.restart[t], 1.0)).collect();
        lp.add_le(terms, scenario.max_daily_restarts as f64);
    }

    let mut problem = MilpProblem::from_lp(lp);
    for t in 0..n {
        problem.set_kind(layout.on[t], VarKind::Binary);
        problem.set_kind(layout.restart[t], VarKind::Binary);
    }
    Ok((problem, layout))
}

/// Solves the scheduling MILP and decodes the solution. The store's state
/// of energy is rebuilt exactly from the decoded charge/discharge flows, so
/// charged minus discharged heat always equals the SOE swing.
pub fn optimise(
    scenario: &NetworkScenario,
    assets: &SiteAssets,
    opts: &SolveOptions,
) -> Result<NetworkSchedule> {
    let (problem, layout) = build(scenario, assets)?;
    let solution = solve_milp(&problem, opts)?;
    match solution.status {
        Status::Optimal | Status::GapLimit => {}
        Status::Infeasible => return Err(diagnose_infeasible(scenario, assets)),
        other => {
            return Err(Error::SolverLimit(format!(
                "scheduler stopped with {other:?}"
            )))
        }
    }

    let n = scenario.len();
    let dt = scenario.dt_hours();
    let chp = &assets.chp;
    let mut steps = Vec::with_capacity(n);
    let mut soe = assets.store.as_ref().map(|s| s.initial_soe).unwrap_or(0.0);
    let mut prev_on = scenario.chp_initially_on;
    for t in 0..n {
        let on = solution.value(layout.on[t]) > 0.5;
        let load = if on {
            solution.value(layout.load[t]).clamp(0.0, 1.0)
        } else {
            0.0
        };
        // Simultaneous charge and discharge is cost-degenerate for a
        // lossless store; net the flows so the reported plan moves heat in
        // one direction per step. SOE and both balances are unchanged.
        let raw_charge = solution.value(layout.q_charge[t]).max(0.0);
        let raw_discharge = solution.value(layout.q_discharge[t]).max(0.0);
        let q_charge = (raw_charge - raw_discharge).max(0.0);
        let q_discharge = (raw_discharge - raw_charge).max(0.0);
        soe += (q_charge - q_discharge) * dt;
        if let Some(store) = &assets.store {
            if soe < store.min_level - 1e-6 || soe > store.capacity + 1e-6 {
                return Err(Error::SolverLimit(format!(
                    "decoded state of energy {soe} escapes [{}, {}] at step {t}",
                    store.min_level, store.capacity
                )));
            }
            soe = soe.clamp(store.min_level, store.capacity);
        }
        let restart = on && !prev_on;
        prev_on = on;
        steps.push(DispatchStep {
            chp_on: on,
            chp_load: load,
            restart,
            e_chp: load * chp.elec_capacity,
            e_import: solution.value(layout.e_import[t]).max(0.0),
            e_export: solution.value(layout.e_export[t]).max(0.0),
            q_chp: load * chp.heat_capacity,
            q_boiler: solution.value(layout.q_boiler[t]).max(0.0),
            q_charge,
            q_discharge,
            soe,
        });
    }
    Ok(schedule_from_steps(scenario, assets, steps))
}

/// Names the first violated aggregate when the MILP has no feasible point.
fn diagnose_infeasible(scenario: &NetworkScenario, assets: &SiteAssets) -> Error {
    let dis = assets
        .store
        .as_ref()
        .map(|s| s.max_discharge_rate)
        .unwrap_or(0.0);
    let chp_available =
        scenario.max_daily_restarts > 0 || scenario.chp_initially_on;
    for t in 0..scenario.len() {
        let demand = scenario.heat_demand.value(t);
        let supply_all = assets.chp.heat_capacity + assets.boiler.heat_capacity + dis;
        if demand > supply_all {
            return Error::Infeasible(format!(
                "heat capacity shortfall at step {t}: demand {demand} kW exceeds \
                 CHP + boiler + discharge capacity {supply_all} kW"
            ));
        }
        if !chp_available && demand > assets.boiler.heat_capacity + dis {
            return Error::Infeasible(format!(
                "heat capacity shortfall at step {t}: CHP unavailable (restart cap) and \
                 demand {demand} kW exceeds boiler + discharge capacity {} kW",
                assets.boiler.heat_capacity + dis
            ));
        }
    }
    Error::Infeasible("electricity balance cannot be met".into())
}
