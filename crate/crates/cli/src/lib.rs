//! Command-line harness: argument parsing, scenario files, experiment
//! dispatch and deterministic CSV/JSON emission.

pub mod args;
pub mod config;
pub mod emit;
pub mod error;
pub mod run;
pub mod scenario;

pub use args::{parse_args, Parsed};
pub use config::{defaults, ExperimentKind, PartialConfig, RunConfig};
pub use error::CliError;
pub use run::{execute, run_main};
pub use scenario::load_scenario;
