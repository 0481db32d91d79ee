//! Command-line verification harness: orbits, bracket sweeps, spectra and quantum identity suites.

pub mod commands;
pub mod suites;

pub use commands::{run, Cli};
