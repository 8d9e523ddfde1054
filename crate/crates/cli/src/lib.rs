//! Command-line front end for poisonlab: configuration, dispatch, the
//! verification runner and CSV/JSON emission.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod verify;

pub use config::{Command, OutputFormat, RunConfig};
pub use error::CliError;
pub use output::ResultRow;

/// Written into every result row.
pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");
