//! Multi-vector energy system modelling and optimisation.
//!
//! `enopt` bundles four pillars of operational energy optimisation behind one
//! time-series data model and a self-contained LP/MILP solver:
//!
//! - [`forecast`] — base forecasting models combined by a weighted ensemble
//!   orchestrator with dynamic inverse-error weights, plus bottom-up
//!   aggregation from meters to portfolio level.
//! - [`building`] — grey-box RC building twin, parameter fitting, Kalman
//!   state estimation, and a cost/carbon/comfort MPC with Pareto weight
//!   sweeps.
//! - [`chp`] — CHP heat-network scheduling as a MILP with real plus
//!   artificial costs, restart caps, and thermal-store state of energy.
//! - [`ems`] — solar PV and battery twins with rule-based, self-consumption,
//!   and cost-optimised dispatch strategies under configurable tariffs.
//!
//! Supporting modules: [`milp`] (simplex + branch and bound), [`series`]
//! (CSV ingestion, resampling, gap filling, anomaly flags, accuracy
//! metrics), [`synth`] (seeded synthetic datasets), and [`run`] (the
//! config-driven scenario runner behind the `enopt` binary).
//!
//! ## Examples
//!
//! The `examples/` directory is the best starting point; each file is a
//! runnable walkthrough of one capability:
//!
//! ```bash
//! cargo run --release --example lp_and_milp        # solver basics + text dump
//! cargo run --release --example meter_pipeline     # CSV → clean series → metrics
//! cargo run --release --example forecast_ensemble  # weighted ensemble + hierarchy
//! cargo run --release --example building_mpc       # RC fit, Kalman, MPC vs thermostat
//! cargo run --release --example pareto_sweep       # cost/carbon/comfort front
//! cargo run --release --example chp_schedule       # CHP week vs rule-based baseline
//! cargo run --release --example ems_dispatch       # battery strategies across tariffs
//! ```
//!
//! The thin `enopt` binary drives the same library from TOML configs; see
//! the README for the command set.

pub mod building;
pub mod chp;
pub mod ems;
pub mod forecast;
pub mod milp;
pub mod run;
pub mod series;
pub mod synth;

mod error;

pub use error::{Error, Result};
