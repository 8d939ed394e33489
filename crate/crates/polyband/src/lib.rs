//! Configuration, file formats and subcommand drivers for `polyband-core`.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod parallel;
pub mod potential_file;

pub use commands::{run, Command, Summary};
pub use config::Experiment;
pub use error::{RunError, RunResult};
