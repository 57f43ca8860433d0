//! Command-line front end for `hcls`: dataset ingestion, single fits,
//! simulation protocols and embedding export.

pub mod commands;
pub mod dataset;
pub mod experiment;
pub mod export;
pub mod pipeline;

pub use commands::{main_with_args, Cli, CliError};
