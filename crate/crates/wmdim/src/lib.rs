//! File formats, reports and the command line front end for [`wmdim_core`].
//!
//! Commands read one JSON config (tower plus parameters) and return their
//! report as text; `main` only parses flags, picks the thread count and maps
//! errors to exit codes.

pub mod commands;
pub mod config;
pub mod example51;
pub mod report;

mod error;

pub use error::{CliError, CliResult};
