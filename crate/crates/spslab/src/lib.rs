//! Scenario driver for the spslab numerical laboratory.
//!
//! A [`ScenarioConfig`] names a scenario and its parameter grids; [`run`]
//! executes it on a bounded worker pool, writes `report.json`, `rows.csv`
//! and any field files, and returns the in-memory [`ScenarioReport`].

mod config;
mod error;
mod report;
mod scenarios;

use std::path::PathBuf;

pub use config::{BoxConfig, GridConfig, InitSpec, ProfileSpec, Scenario, ScenarioConfig};
pub use error::{Error, Result};
pub use report::{Environment, FieldData, Outcome, Row, ScenarioReport, Verdict};

/// Output directory used when the configuration names none.
pub fn default_out_dir(scenario: Scenario) -> PathBuf {
    PathBuf::from("out").join(scenario.name())
}

/// Runs the configured scenario and writes its artifacts.
pub fn run(config: &ScenarioConfig) -> Result<ScenarioReport> {
    let mut report = execute(config)?;
    let dir = config
        .out
        .clone()
        .unwrap_or_else(|| default_out_dir(config.scenario().unwrap_or(Scenario::Energy)));
    report.write(&dir)?;
    Ok(report)
}

/// Runs the configured scenario without touching the file system.
pub fn execute(config: &ScenarioConfig) -> Result<ScenarioReport> {
    let scenario = config.scenario()?;
    let workers = config.workers();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Pool(e.to_string()))?;
    let out = pool.install(|| scenarios::dispatch(scenario, config))?;
    Ok(ScenarioReport {
        scenario: scenario.name().to_string(),
        seed: config.seed,
        workers,
        environment: Environment::current(),
        config: config.clone(),
        verdicts: out.verdicts,
        rows: out.rows,
        runtimes: out.runtimes,
        fields: out.fields.iter().map(|f| f.0.clone()).collect(),
        field_data: out.fields,
    })
}
