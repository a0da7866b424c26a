//! Spec-file parsing and the subcommands of the `orbit-rank` tool.

pub mod commands;
pub mod config;
pub mod spec;
