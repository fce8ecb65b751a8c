//! Driver behind the `cubic-hodge` binary: argument parsing, the per-genus
//! cache, and report rendering.

pub mod cache;
pub mod commands;
pub mod config;
pub mod render;

pub use commands::{run, run_config, CliError, Outcome};
pub use config::{Cli, CommandKind, Format, RunConfig, Suite};
