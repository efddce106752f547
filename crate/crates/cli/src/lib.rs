//! Batch driver for the `c0dyn` toolkit: configuration, tables and the
//! experiments behind each subcommand of the `c0dyn` binary.

pub mod config;
pub mod expr;
pub mod report;
pub mod run;
pub mod table;

pub use config::{resolve, ExperimentConfig, Format, OUTPUT_DIR_ENV};
pub use report::{run_full_report, Check, ReportOutcome};
pub use table::{Cell, Table};
