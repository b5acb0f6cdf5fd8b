//! Spec-file front end for the `froelicher` calculus.

pub mod commands;
pub mod error;
pub mod spec;

pub use commands::{run, Cli, Command, Outcome};
pub use error::CliError;
pub use spec::{parse_form, parse_spec, read_spec, SpecFile};
