//! Command-line harness for the `achronal` crate: verification suites,
//! localization estimates, influence tables and spin decompositions, with
//! deterministic JSON and CSV reports.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod inputs;
pub mod report;
pub mod suites;

pub use args::Cli;
pub use commands::execute;
pub use config::{Format, RunConfig, Thresholds};
pub use error::{CliError, CliResult};
pub use report::{Property, SuiteReport};
pub use suites::Suite;
