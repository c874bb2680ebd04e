//! Command-line frontend for witnesslab: subcommands, the verification report
//! and the per-modulus table.

pub mod app;
pub mod error;
pub mod format;
pub mod report;
pub mod table;

pub use error::{CliError, CliResult};
