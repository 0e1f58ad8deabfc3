//! Experiment runner behind the `nhqdyn` binary: JSON experiment specs in,
//! CSV traces and JSON reports out.

pub mod args;
pub mod error;
pub mod output;
pub mod run;
pub mod spec;
pub mod state_expr;

pub use error::{CliError, CliResult};
pub use spec::{parse_spec, ExperimentSpec};
