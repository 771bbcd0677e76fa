//! Experiment harness: scenario files, parameter sweeps, CSV output,
//! reproduction of the reference tables/figures and analytic-vs-simulation
//! verification.

pub mod config;
pub mod format;
pub mod reproduce;
pub mod sweep;
pub mod verify;
