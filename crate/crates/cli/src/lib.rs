//! Scenario files, built-in scenarios, stability reports and trajectory
//! CSV output for the `leadcons` command.
//!
//! Node numbers in configs and CSV headers are one-based.

pub mod commands;
pub mod config;
pub mod csv;
pub mod error;
pub mod report;
pub mod scenario;

pub use config::ScenarioConfig;
pub use error::CliError;
pub use report::StabilityReportDoc;
