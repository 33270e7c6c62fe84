//! Command-line front end: scenario files, subcommands and table output.

pub mod commands;
pub mod output;
pub mod scenario;
