//! Experiment driver for the band-comparison studies: parses flat
//! key-value configs, runs seeded Monte-Carlo sweeps in parallel, and
//! writes the aggregated curves as CSV.

pub mod config;
pub mod csv_io;
pub mod error;
pub mod seeding;
pub mod study;

pub use error::{Error, Result};
