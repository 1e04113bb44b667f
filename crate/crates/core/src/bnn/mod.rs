//! Bit-exact inference for the LUT-constrained 2-bit network.

mod forward;
mod genome;
mod network;
pub mod ops;
mod types;

pub use forward::{forward, forward_traced, ForwardTrace, LayerTrace};
pub use genome::{Genome, LayerKind, LayerSpec, NetworkShape, GENOME_LAYOUT_VERSION};
pub use network::{Network, Scratch};
pub use ops::{
    activate, adder_depth, cam_multiply, classify, first_layer_op, quantize_12_to_7,
    thresholds_for, tree_sum, CAM_TABLE,
};
pub use types::{
    ActivationThresholds, ClassLabel, InputSample, NeuronValue, RawSample, WeightCode, INPUT_BITS,
    MAX_INPUT, MAX_NEURON, MAX_RAW, NEURON_BITS,
};

/// Quantizes a raw frame into network inputs.
pub fn quantize_frame(raw: &[RawSample]) -> Vec<InputSample> {
    raw.iter().copied().map(quantize_12_to_7).collect()
}
