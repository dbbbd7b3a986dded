//! Configuration, scenario bank, commands and file output of the `selsys`
//! command-line runner.

pub mod commands;
pub mod config;
pub mod output;
pub mod scenarios;
