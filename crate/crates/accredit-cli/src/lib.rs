//! Library backing the `accredit` binary: config ingestion, fixture
//! formats, report assembly, and the command implementations. The binary is
//! a thin clap dispatcher over [`commands`].

pub mod commands;
pub mod config;
pub mod error;
pub mod fixtures;
pub mod report;

pub use error::{CliError, ExitKind};
