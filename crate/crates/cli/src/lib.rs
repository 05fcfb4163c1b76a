//! Command-line front end for the `eprfw` engine.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
