//! Scenario files, a task runner and report rendering on top of
//! `relframe-core`.

pub mod report;
pub mod runner;
pub mod scenario;

pub use report::{emit_report, render, ReportFormat, UnknownFormat};
pub use runner::{run_scenario, RunReport, Status, Summary, TaskEntry, Witness};
pub use scenario::{parse_scenario, parse_scenario_with, Overrides, ScenarioError, ScenarioSpec};

/// Environment variable replacing the built-in default tolerance.
pub const TOLERANCE_ENV: &str = "RELFRAME_TOLERANCE";
