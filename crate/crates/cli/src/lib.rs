//! Command-line front end for `nesy-verify`: IDX ingestion, synthetic digit
//! fixtures, and the `compile`, `verify`, `bench-addition`, `emajsat-check`,
//! `train` and `setup-addition` subcommands.

pub mod args;
pub mod bench;
pub mod commands;
pub mod digits;
pub mod error;
pub mod idx;

pub use error::{CliError, CliResult};
