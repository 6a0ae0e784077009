//! Batch driver for the Finsler Hardy-inequality checks.
//!
//! A JSON [`config::RunConfig`] names a metric, a grid and domain, a weight,
//! a test function and a list of checks. [`run::run`] evaluates the checks
//! and [`output`] writes the CSV and JSON reports.

pub mod config;
pub mod info;
pub mod output;
pub mod run;

pub use config::{load, ConfigError, LoadedConfig, RunConfig};
pub use run::{run, CheckRow, RunReport, SetupError};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NON_CONVERGENCE: i32 = 3;
