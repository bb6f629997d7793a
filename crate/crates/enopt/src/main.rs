use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use enopt::run::{self, Command, RunOptions};

/// Multi-vector energy scenario runner: demand forecasting, building MPC,
/// CHP heat-network scheduling, and battery/PV dispatch.
#[derive(Parser)]
#[command(name = "enopt", version, about)]
struct Cli {
    #[command(subcommand)]
    command: CliCommand,
}

#[derive(Parser)]
struct CommonArgs {
    /// TOML configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overrides the config's `out_dir`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Random seed (overrides the config's `seed`).
    #[arg(long)]
    seed: Option<u64>,
    /// Progress chatter on stderr.
    #[arg(long)]
    verbose: bool,
}

#[derive(Subcommand)]
enum CliCommand {
    /// Backtest the forecasting ensemble and aggregate up the hierarchy.
    Forecast(CommonArgs),
    /// Fit RC thermal parameters from building history.
    FitBuilding(CommonArgs),
    /// Closed-loop MPC run against the thermostat baseline.
    Mpc(CommonArgs),
    /// Objective-weight sweep and the non-dominated front.
    Pareto(CommonArgs),
    /// Optimise a CHP heat-network schedule and compare to the rule-based
    /// baseline.
    Chp(CommonArgs),
    /// Run the three dispatch strategies across the tariff scenarios.
    Ems(CommonArgs),
    /// Generate the bundled synthetic dataset and ready-made configs.
    Synth(CommonArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args) = match cli.command {
        CliCommand::Forecast(a) => (Command::Forecast, a),
        CliCommand::FitBuilding(a) => (Command::FitBuilding, a),
        CliCommand::Mpc(a) => (Command::Mpc, a),
        CliCommand::Pareto(a) => (Command::Pareto, a),
        CliCommand::Chp(a) => (Command::Chp, a),
        CliCommand::Ems(a) => (Command::Ems, a),
        CliCommand::Synth(a) => (Command::Synth, a),
    };
    let opts = RunOptions {
        config_path: args.config,
        out_dir: args.out,
        seed: args.seed,
        verbose: args.verbose,
    };
    match run::run(command, &opts) {
        Ok(summary) => {
            println!(
                "{}: wrote {} file(s) to {}",
                command.name(),
                summary.outputs.len(),
                summary.out_dir.display()
            );
            for name in summary.outputs {
                println!("  {name}");
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("{}", run::error_code(&err));
            eprintln!("{}: {err}", command.name());
            ExitCode::from(run::exit_code_for(&err) as u8)
        }
    }
}
