//! Reference forward pass. Follows the hardware dataflow literally: one
//! operation per connection, a balanced adder tree per neuron, then the
//! threshold compare. [`super::Network`] is the fast equivalent used in
//! training.

use super::genome::{Genome, LayerKind, LayerSpec};
use super::ops::{activate, cam_multiply, first_layer_op, thresholds_for, tree_sum};
use super::types::{ActivationThresholds, InputSample, NeuronValue};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayerTrace {
    pub sums: Vec<u32>,
    pub nonzero: Vec<usize>,
    pub thresholds: Vec<ActivationThresholds>,
    pub values: Vec<NeuronValue>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ForwardTrace {
    pub layers: Vec<LayerTrace>,
}

pub fn forward(genome: &Genome, input: &[InputSample]) -> Result<Vec<NeuronValue>> {
    run(genome, input, None)
}

pub fn forward_traced(
    genome: &Genome,
    input: &[InputSample],
) -> Result<(Vec<NeuronValue>, ForwardTrace)> {
    let mut trace = ForwardTrace::default();
    let out = run(genome, input, Some(&mut trace))?;
    Ok((out, trace))
}

pub(crate) fn check_input_len(expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(Error::ShapeMismatch {
            expected: format!("{expected} input samples"),
            actual: format!("{actual} input samples"),
        });
    }
    Ok(())
}

fn run(
    genome: &Genome,
    input: &[InputSample],
    mut trace: Option<&mut ForwardTrace>,
) -> Result<Vec<NeuronValue>> {
    let shape = genome.shape();
    check_input_len(shape.input_len(), input.len())?;

    let mut prev: Vec<NeuronValue> = Vec::new();
    for layer in shape.layers() {
        let weights = genome.layer_weights(&layer);
        let summands = |dst: usize| -> Vec<u32> {
            let row = &weights[dst * layer.inputs..(dst + 1) * layer.inputs];
            match layer.kind {
                LayerKind::First => row
                    .iter()
                    .zip(input)
                    .map(|(&w, &x)| first_layer_op(w, x) as u32)
                    .collect(),
                LayerKind::Cam => row
                    .iter()
                    .zip(&prev)
                    .map(|(&w, &x)| cam_multiply(w, x).get() as u32)
                    .collect(),
            }
        };
        let mut lt = LayerTrace {
            sums: Vec::with_capacity(layer.outputs),
            nonzero: Vec::with_capacity(layer.outputs),
            thresholds: Vec::with_capacity(layer.outputs),
            values: Vec::with_capacity(layer.outputs),
        };
        for dst in 0..layer.outputs {
            let (sum, _) = tree_sum(&summands(dst))?;
            let sum = sum as u32;
            let nonzero = row_nonzero(weights, &layer, dst);
            let th = thresholds_for(nonzero, layer.kind.input_max());
            // A neuron with every input blocked is silent.
            let value = if nonzero == 0 {
                NeuronValue::ZERO
            } else {
                activate(sum, &th)
            };
            lt.sums.push(sum);
            lt.nonzero.push(nonzero);
            lt.thresholds.push(th);
            lt.values.push(value);
        }
        prev = lt.values.clone();
        if let Some(t) = trace.as_deref_mut() {
            t.layers.push(lt);
        }
    }
    Ok(prev)
}

fn row_nonzero(weights: &[super::types::WeightCode], layer: &LayerSpec, dst: usize) -> usize {
    weights[dst * layer.inputs..(dst + 1) * layer.inputs]
        .iter()
        .filter(|w| !w.is_block())
        .count()
}
