//! Combinatorial VHDL generation, a parsing netlist mirror, and structural
//! estimates.

mod emit;
mod mirror;

pub use emit::{
    clocked_constructs, emit_entity, emit_package, validate_entity_name, EmittedDesign,
    CLOCKED_DENY_LIST, EMITTER_VERSION, PACKAGE_NAME,
};
pub use mirror::{mirror_evaluate, NetlistMirror, Node, NodeCounts, Operand};

use serde::Serialize;

use crate::bnn::{adder_depth, Genome};

/// Per-layer resource figures for a genome.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LayerStructure {
    /// LUT operations: one per nonzero weight.
    pub op_nodes: usize,
    /// Two-input adders.
    pub adders: usize,
    /// Deepest adder tree in the layer.
    pub adder_depth: u32,
    /// Adder tree depth per neuron.
    pub neuron_depths: Vec<u32>,
    /// Three threshold comparators per non-silent neuron.
    pub comparators: usize,
    pub silent_neurons: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StructureEstimate {
    pub layers: Vec<LayerStructure>,
    pub nonzero_weights: usize,
    pub input_port_bits: usize,
    pub output_port_bits: usize,
}

impl StructureEstimate {
    pub fn op_nodes(&self) -> usize {
        self.layers.iter().map(|l| l.op_nodes).sum()
    }

    pub fn adders(&self) -> usize {
        self.layers.iter().map(|l| l.adders).sum()
    }

    pub fn comparators(&self) -> usize {
        self.layers.iter().map(|l| l.comparators).sum()
    }

    /// Sum of per-layer depths, the adder levels on the longest path.
    pub fn critical_adder_depth(&self) -> u32 {
        self.layers.iter().map(|l| l.adder_depth).sum()
    }
}

/// Counts the hardware a genome needs without emitting any text.
pub fn estimate_structure(genome: &Genome) -> StructureEstimate {
    let shape = genome.shape();
    let layers = shape
        .layers()
        .iter()
        .map(|layer| {
            let w = genome.layer_weights(layer);
            let counts: Vec<usize> = w
                .chunks(layer.inputs)
                .map(|row| row.iter().filter(|c| !c.is_block()).count())
                .collect();
            let neuron_depths: Vec<u32> = counts.iter().map(|&n| adder_depth(n)).collect();
            let silent = counts.iter().filter(|&&n| n == 0).count();
            LayerStructure {
                op_nodes: counts.iter().sum(),
                adders: counts.iter().map(|&n| n.saturating_sub(1)).sum(),
                adder_depth: neuron_depths.iter().copied().max().unwrap_or(0),
                neuron_depths,
                comparators: 3 * (counts.len() - silent),
                silent_neurons: silent,
            }
        })
        .collect();
    StructureEstimate {
        layers,
        nonzero_weights: genome.nonzero_weight_count(),
        input_port_bits: shape.input_len() * crate::bnn::INPUT_BITS,
        output_port_bits: shape.output_len() * crate::bnn::NEURON_BITS,
    }
}
