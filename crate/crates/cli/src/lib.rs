//! Front end for `monster-core`: expression parsing, run configuration and
//! the subcommand bodies behind the `monster` binary.

pub mod commands;
pub mod config;
pub mod parse;
