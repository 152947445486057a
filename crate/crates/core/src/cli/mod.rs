//! Scenario presets, sweeps, tabular output and the identity suite.

pub mod config;
pub mod scenario;
pub mod table;
pub mod verify;

pub use config::{apply_setting, apply_settings, custom_base, load_config, parse_config, PendingSweep};
pub use scenario::{preset, preset_names, presets, run_scenario, Observable, Scenario, Sweep, SweepParam, TransitionSel};
pub use table::OutputTable;
pub use verify::{verify_all, CheckResult};

/// Environment variable holding the worker-thread count for sweeps.
pub const WORKERS_ENV: &str = "V3LA_WORKERS";

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("invalid scenario: {0}")]
    Validation(String),
    #[error("scenario `{scenario}`: {source}")]
    Computation {
        scenario: String,
        #[source]
        source: crate::Error,
    },
}

impl ScenarioError {
    /// Process exit code: 1 for bad input, 2 for numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            ScenarioError::Validation(_) => 1,
            ScenarioError::Computation { .. } => 2,
        }
    }
}
