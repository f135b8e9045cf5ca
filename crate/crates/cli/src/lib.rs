//! Panel runner, JSON reports and exporters for `qhahn-core`.

pub mod config;
pub mod error;
pub mod export;
pub mod report;
pub mod run;

pub use crate::config::{PanelConfig, Suite};
pub use crate::error::{CliError, CliResult, EXIT_CONFIG, EXIT_FAIL, EXIT_PASS};
pub use crate::report::SuiteReport;
pub use crate::run::run;
