//! LUT-constrained 2-bit neural networks for SiPM waveform classification.
//!
//! - [`bnn`]: bit-exact inference built only from LUT-friendly operations.
//! - [`sim`]: synthetic single-pulse, pile-up and noise waveforms.
//! - [`ga`]: genetic-algorithm training with resampled, noisy fitness.
//! - [`hdl`]: combinatorial VHDL emission and a netlist mirror that checks it.

pub mod bnn;
pub mod error;
pub mod ga;
pub mod hdl;
pub mod seed;
pub mod sim;

pub use error::{Error, Result};
