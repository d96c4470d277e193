//! Running a configured scenario end to end.

use std::path::Path;

use thiserror::Error;

use sbdyn_core::simulation::{SimulationError, TerminationReason, TrajectoryLog};

use crate::config::{load_config, BuildError, ConfigError, ScenarioConfig};
use crate::export::{save_csv, save_json, ExportError};

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error("simulation: {0}")]
    Simulation(#[from] SimulationError),
    #[error("output: {0}")]
    Export(#[from] ExportError),
}

/// Process exit status for the command line.
pub fn exit_code(reason: TerminationReason) -> i32 {
    match reason {
        TerminationReason::Completed => 0,
        TerminationReason::Collision | TerminationReason::CommandBelowSurface => 3,
        TerminationReason::NumericalAbort => 4,
    }
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) | Self::Build(_) | Self::Simulation(_) => 2,
            Self::Export(_) => 1,
        }
    }
}

/// Build and run; `seed` overrides the configured seed.
pub fn run_config(config: &ScenarioConfig, seed: Option<u64>) -> Result<TrajectoryLog, RunError> {
    let mut scenario = config.build()?;
    if seed.is_some() {
        scenario.seed = seed;
    }
    Ok(scenario.run()?)
}

/// Load `path`, run it and write the configured outputs.
pub fn run_file(path: &Path, seed: Option<u64>) -> Result<(ScenarioConfig, TrajectoryLog), RunError> {
    let config = load_config(path)?;
    let log = run_config(&config, seed)?;
    if let Some(csv) = &config.csv {
        save_csv(&log.records, csv)?;
    }
    if let Some(json) = &config.json {
        save_json(&log, json)?;
    }
    Ok((config, log))
}
