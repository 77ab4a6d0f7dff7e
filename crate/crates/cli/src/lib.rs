//! Command-line front end: job files, reports, and the acceptance batteries.

pub mod commands;
pub mod job;
pub mod random;
pub mod report;
pub mod suite;

pub use commands::{run_job, Outcome};
pub use job::{CliError, Command, JobSpec, Mode};
pub use report::{emit_report, Report, Status, Table};
pub use suite::{CriterionResult, Suite, SuiteConfig};
