//! Configured runs: a TOML scenario (or a named preset) is integrated,
//! analyzed and written out as a CSV time series plus a JSON summary.

mod config;
mod presets;
mod run;

pub use config::{
    DissipatorConfig, DriveConfig, DynamicsConfig, Entry, MatrixConfig, ObservableConfig, ResolvedScenario,
    ScenarioConfig, StateConfig, TimeConfig, Tolerances,
};
pub use presets::{preset, PRESETS};
pub use run::{
    run_scenario, IntegratorSummary, OracleSummary, SampleRow, ScenarioReport, Summary, FLAG_AMBIGUOUS,
    FLAG_DEGENERATE, FLAG_FD_MISMATCH, FLAG_FIRST_LAW,
};
