//! Configuration, initial conditions, file formats and experiment drivers
//! for the `nlac` command-line tool.

pub mod config;
pub mod dump;
pub mod error;
pub mod experiments;
pub mod initial;
pub mod output;

pub use config::{parse_entries, ExperimentConfig, ExperimentKind, InitialKind};
pub use dump::{format_field, parse_field, FieldDump};
pub use error::{HarnessError, Result};
pub use initial::InitialCondition;
pub use output::{execute, OutputDir};
