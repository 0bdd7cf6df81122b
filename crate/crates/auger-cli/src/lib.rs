//! Batch front end for the four-level Auger photoemission model.
//!
//! Subcommands read a flat key-value config, run one model artifact each
//! (trajectory, steady state, sweep, decay comparison, or spectrum), and
//! write delimited tables plus standalone SVG plots into an output
//! directory. Identical config and seed always produce byte-identical
//! tables.

pub mod config;
pub mod error;
pub mod plot;
pub mod runner;
pub mod sweep;

pub use error::CliError;
