//! Command-line front end: expression compiler, report serialization,
//! configuration files and subcommand implementations.

pub mod commands;
pub mod config;
pub mod expr;
pub mod report;
