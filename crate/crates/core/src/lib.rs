//! Instrument maps for indirect photodetection of a truncated cavity mode.
//!
//! A two-level atom (the pointer) crosses the cavity, interacts with the
//! field (the target) while relaxing into its environment, and is then read
//! out in `{g, e}`. This crate builds the conditional maps that send the
//! initial field state to the unnormalized post-measurement field state for
//! each readout, integrates them in time, and evaluates outcome probability,
//! information gain and fidelity.
//!
//! Everything here is allocation-only and runs without `std`; file formats,
//! the command line and sweeps live in the companion `photodet` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod error;
pub mod fock;
pub mod instrument;
pub mod linalg;
pub mod metrics;
pub mod oracle;
pub mod params;
pub mod superop;

pub use error::{Error, Result};
pub use fock::{Operator, TruncationMode};
pub use instrument::{BlockGenerator, InstrumentBranch, Preparation};
pub use metrics::{LogBase, MetricsRecord};
pub use params::{ModelParams, Regime};
pub use superop::SuperOp;

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
