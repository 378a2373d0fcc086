//! Driver for the `tavis` binary: configuration, CSV output, sweeps and
//! closed-form audits.

pub mod config;
mod error;
pub mod run;

pub use config::{AuditMode, Initial, Mode, PartialConfig, RunConfig, SweepParam, SweepSpec};
pub use error::{CliError, CliResult};
