//! Command-line front end: price files, pipelines and report tables.

pub mod commands;
pub mod error;
pub mod io;
pub mod pipeline;
pub mod report;

pub use commands::run;
pub use error::{CliError, CliResult};
