//! Command-line plumbing for `diffsel`: file formats and subcommands.

pub mod commands;
pub mod config;
pub mod error;
pub mod files;

pub use error::CliError;
