//! Experiment harness for the `camspmv` accelerator model: batch runs with
//! oracle checking, corpus benchmarks, bandwidth sweeps and report output.

pub mod cli;
pub mod error;
pub mod experiment;
pub mod report;

pub use error::{HarnessError, Result};
