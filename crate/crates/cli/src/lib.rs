//! Library side of the `mmcodes` command-line tool: config loading, bundle
//! manifests and the subcommand implementations.

pub mod commands;
pub mod config;
pub mod error;
pub mod fixtures;
pub mod manifest;
