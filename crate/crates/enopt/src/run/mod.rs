//! Configuration-driven scenario runner.
//!
//! Each command reads one TOML config plus the CSV inputs it names,
//! validates everything up front, computes, and only then writes its
//! artifacts to the output directory — a failed run leaves no partial
//! outputs. Every run ends with a `manifest.json` listing the config hash,
//! the inputs (with content hashes), the outputs, and the seed, and runs
//! with the same config and seed are byte-identical.

mod building_cmd;
mod chp_cmd;
mod ems_cmd;
mod forecast_cmd;
mod synth_cmd;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Forecast,
    FitBuilding,
    Mpc,
    Pareto,
    Chp,
    Ems,
    Synth,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Forecast => "forecast",
            Command::FitBuilding => "fit-building",
            Command::Mpc => "mpc",
            Command::Pareto => "pareto",
            Command::Chp => "chp",
            Command::Ems => "ems",
            Command::Synth => "synth",
        }
    }
}

/// Flags common to every command.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub config_path: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
    pub seed: Option<u64>,
    pub verbose: bool,
}

/// What a successful run produced.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub out_dir: PathBuf,
    pub outputs: Vec<String>,
}

/// Executes one command. Exit-code mapping for binaries lives in
/// [`exit_code_for`].
pub fn run(command: Command, opts: &RunOptions) -> Result<RunSummary> {
    match command {
        Command::Synth => synth_cmd::run(opts),
        Command::Forecast => forecast_cmd::run(opts),
        Command::FitBuilding => building_cmd::run_fit(opts),
        Command::Mpc => building_cmd::run_mpc(opts),
        Command::Pareto => building_cmd::run_pareto(opts),
        Command::Chp => chp_cmd::run(opts),
        Command::Ems => ems_cmd::run(opts),
    }
}

/// Process exit code for an error: 2 config/input, 3 infeasible, 4 solver
/// limit.
pub fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Infeasible(_) => 3,
        Error::SolverLimit(_) => 4,
        _ => 2,
    }
}

/// Single-token machine-readable code, printed before the human detail.
pub fn error_code(err: &Error) -> &'static str {
    match err {
        Error::Infeasible(_) => "E_INFEASIBLE",
        Error::SolverLimit(_) => "E_SOLVER_LIMIT",
        _ => "E_CONFIG",
    }
}

/// Shared header every config file may carry.
#[derive(Debug, Clone, Deserialize, Default)]
pub(crate) struct CommonConfig {
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    #[serde(default)]
    pub seed: Option<u64>,
}

pub(crate) struct LoadedConfig<T> {
    pub config: T,
    pub config_dir: PathBuf,
    pub config_sha256: String,
    pub out_dir: PathBuf,
    pub seed: u64,
}

/// Reads and parses the command's TOML config, resolving the output
/// directory and seed from flags (which win) or the config header.
pub(crate) fn load_config<T: serde::de::DeserializeOwned>(
    opts: &RunOptions,
    command: &str,
) -> Result<LoadedConfig<T>> {
    let path = opts.config_path.as_ref().ok_or_else(|| {
        Error::InvalidInput(format!("{command}: --config <path> is required"))
    })?;
    let bytes = std::fs::read(path).map_err(|e| {
        Error::InvalidInput(format!("cannot read config {}: {e}", path.display()))
    })?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|_| Error::InvalidInput(format!("{}: config is not UTF-8", path.display())))?;
    let config: T = toml::from_str(&text).map_err(|e| {
        Error::InvalidInput(format!("{}: {e}", path.display()))
    })?;
    let common: CommonConfig = toml::from_str(&text).unwrap_or_default();
    let config_dir = path
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."));
    let out_dir = opts
        .out_dir
        .clone()
        .or_else(|| common.out_dir.as_ref().map(|d| config_dir.join(d)))
        .ok_or_else(|| {
            Error::InvalidInput(format!(
                "{command}: no output directory (pass --out or set out_dir in the config)"
            ))
        })?;
    Ok(LoadedConfig {
        config,
        config_dir,
        config_sha256: sha256_hex(&bytes),
        out_dir,
        seed: opts.seed.or(common.seed).unwrap_or(0),
    })
}

pub(crate) fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Collects outputs in memory; nothing touches the filesystem until
/// [`OutputSet::write`].
pub(crate) struct OutputSet {
    command: &'static str,
    seed: u64,
    config_sha256: Option<String>,
    inputs: BTreeMap<String, String>,
    files: Vec<(String, Vec<u8>)>,
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'a str,
    seed: u64,
    config_sha256: Option<&'a str>,
    inputs: &'a BTreeMap<String, String>,
    outputs: BTreeMap<&'a str, String>,
}

impl OutputSet {
    pub fn new(command: &'static str, seed: u64, config_sha256: Option<String>) -> Self {
        Self {
            command,
            seed,
            config_sha256,
            inputs: BTreeMap::new(),
            files: Vec::new(),
        }
    }

    /// Records an input file and its content hash in the manifest.
    pub fn record_input(&mut self, name: impl Into<String>, bytes: &[u8]) {
        self.inputs.insert(name.into(), sha256_hex(bytes));
    }

    pub fn add(&mut self, name: impl Into<String>, bytes: Vec<u8>) {
        self.files.push((name.into(), bytes));
    }

    pub fn add_json<T: Serialize>(&mut self, name: impl Into<String>, value: &T) -> Result<()> {
        let mut bytes = serde_json::to_vec_pretty(value)
            .map_err(|e| Error::InvalidInput(format!("serialisation failed: {e}")))?;
        bytes.push(b'\n');
        self.add(name, bytes);
        Ok(())
    }

    /// Writes every artifact plus `manifest.json`, creating the directory.
    pub fn write(self, out_dir: &Path) -> Result<RunSummary> {
        std::fs::create_dir_all(out_dir)?;
        let mut outputs = BTreeMap::new();
        for (name, bytes) in &self.files {
            outputs.insert(name.as_str(), sha256_hex(bytes));
        }
        let manifest = Manifest {
            command: self.command,
            seed: self.seed,
            config_sha256: self.config_sha256.as_deref(),
            inputs: &self.inputs,
            outputs,
        };
        let mut manifest_bytes = serde_json::to_vec_pretty(&manifest)
            .map_err(|e| Error::InvalidInput(format!("manifest serialisation failed: {e}")))?;
        manifest_bytes.push(b'\n');

        let mut names = Vec::with_capacity(self.files.len() + 1);
        for (name, bytes) in self.files {
            std::fs::write(out_dir.join(&name), bytes)?;
            names.push(name);
        }
        std::fs::write(out_dir.join("manifest.json"), manifest_bytes)?;
        names.push("manifest.json".to_string());
        Ok(RunSummary {
            out_dir: out_dir.to_path_buf(),
            outputs: names,
        })
    }
}

/// Reads an input file, remembering it for the manifest.
pub(crate) fn read_input(
    outputs: &mut OutputSet,
    config_dir: &Path,
    rel: &Path,
) -> Result<PathBuf> {
    let path = if rel.is_absolute() {
        rel.to_path_buf()
    } else {
        config_dir.join(rel)
    };
    let bytes = std::fs::read(&path).map_err(|e| {
        Error::InvalidInput(format!("missing input file {}: {e}", path.display()))
    })?;
    outputs.record_input(rel.display().to_string(), &bytes);
    Ok(path)
}

/// Builds a CSV table in memory: header row plus stringified cells.
pub(crate) fn csv_bytes(header: &[&str], rows: Vec<Vec<String>>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.into_inner()
        .map_err(|e| Error::InvalidInput(format!("csv assembly failed: {e}")))
}

pub(crate) fn fmt_f64(v: f64) -> String {
    format!("{v}")
}
