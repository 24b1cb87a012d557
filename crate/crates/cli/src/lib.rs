//! Command-line front end for the temporal-mode pipeline.

pub mod app;
pub mod config;
pub mod error;
pub mod pipeline;
pub mod presets;
pub mod run;

pub use error::{CliError, CliResult};
