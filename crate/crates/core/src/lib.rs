//! Outage analysis, Monte Carlo simulation and power allocation for an
//! underlay cognitive radio link pair assisted by one decode-and-forward
//! relay that serves the primary and the secondary user at the same time.
//!
//! * [`system`]: scenario parameters and derived thresholds/SNRs.
//! * [`numerics`]: adaptive quadrature for the ∫ e^{cx}/x integrals.
//! * [`analytic`]: closed-form and bounded outage probabilities.
//! * [`montecarlo`]: event-level simulator used as an independent check.
//! * [`allocator`]: choice of the relay power split and relay SNR.
//! * [`harness`]: config files, sweeps, CSV output and reproduction targets.

pub mod allocator;
pub mod analytic;
pub mod error;
pub mod harness;
pub mod montecarlo;
pub mod numerics;
pub mod system;

pub use error::{Error, Result};
