//! Experiment runner for the space-time least-squares solvers.
//!
//! An [`ExperimentConfig`] is a JSON document naming one experiment and all of
//! its constants. [`run`] produces one [`ConvergenceRecord`] per parameter
//! point and writes them as `<experiment>.csv` next to a log-log
//! `<experiment>.svg`.

pub mod config;
pub mod error;
pub mod fit;
pub mod plot;
pub mod records;
pub mod run;

pub use config::{CollocationRule, Experiment, ExperimentConfig, Method};
pub use error::{CliError, Result};
pub use fit::fit_order;
pub use records::ConvergenceRecord;
pub use run::{run, run_records};
