use super::forward::check_input_len;
use super::genome::{Genome, LayerKind};
use super::ops::{activate, thresholds_for, INCR_SHIFT};
use super::types::{ActivationThresholds, InputSample, NeuronValue, WeightCode};
use crate::error::Result;

/// A genome compiled for fast repeated inference.
///
/// Every layer stores three lane masks per neuron (one per non-Block code),
/// so a neuron sum is `sum(pass & m1) + sum(incr & m2) + sum(neg & m3)` over
/// precomputed operand vectors. Bit-exact with [`super::forward`].
#[derive(Debug, Clone)]
pub struct Network {
    input_len: usize,
    layers: Vec<CompiledLayer>,
}

#[derive(Debug, Clone)]
struct CompiledLayer {
    kind: LayerKind,
    inputs: usize,
    outputs: usize,
    /// `outputs * 3 * inputs` lanes, 0 or `u32::MAX`.
    masks: Vec<u32>,
    thresholds: Vec<ActivationThresholds>,
    silent: Vec<bool>,
}

/// Reusable buffers for [`Network::run`].
#[derive(Debug, Default, Clone)]
pub struct Scratch {
    operands: Vec<u32>,
    a: Vec<u32>,
    b: Vec<u32>,
}

impl Network {
    pub fn compile(genome: &Genome) -> Self {
        let shape = genome.shape();
        let layers = shape
            .layers()
            .iter()
            .map(|spec| {
                let w = genome.layer_weights(spec);
                let mut masks = vec![0u32; spec.outputs * 3 * spec.inputs];
                let mut thresholds = Vec::with_capacity(spec.outputs);
                let mut silent = Vec::with_capacity(spec.outputs);
                for dst in 0..spec.outputs {
                    let row = &w[dst * spec.inputs..(dst + 1) * spec.inputs];
                    let base = dst * 3 * spec.inputs;
                    let mut nonzero = 0;
                    for (src, &code) in row.iter().enumerate() {
                        if code != WeightCode::Block {
                            nonzero += 1;
                            let variant = code as usize - 1;
                            masks[base + variant * spec.inputs + src] = u32::MAX;
                        }
                    }
                    thresholds.push(thresholds_for(nonzero, spec.kind.input_max()));
                    silent.push(nonzero == 0);
                }
                CompiledLayer {
                    kind: spec.kind,
                    inputs: spec.inputs,
                    outputs: spec.outputs,
                    masks,
                    thresholds,
                    silent,
                }
            })
            .collect();
        Network {
            input_len: shape.input_len(),
            layers,
        }
    }

    pub fn input_len(&self) -> usize {
        self.input_len
    }

    pub fn forward(&self, input: &[InputSample]) -> Result<Vec<NeuronValue>> {
        check_input_len(self.input_len, input.len())?;
        let x: Vec<u8> = input.iter().map(|s| s.get()).collect();
        let mut scratch = Scratch::default();
        Ok(self
            .run(&x, &mut scratch)
            .iter()
            .map(|&v| NeuronValue::new_unchecked(v as u8))
            .collect())
    }

    /// Runs on already-quantized samples (each <= 127) and returns the output
    /// neuron values. The caller guarantees `x.len() == input_len`.
    pub fn run<'s>(&self, x: &[u8], scratch: &'s mut Scratch) -> &'s [u32] {
        debug_assert_eq!(x.len(), self.input_len);
        let Scratch { operands, a, b } = scratch;
        a.clear();
        a.extend(x.iter().map(|&v| v as u32));
        for layer in &self.layers {
            layer.prepare_operands(a, operands);
            b.clear();
            for dst in 0..layer.outputs {
                let v = if layer.silent[dst] {
                    0
                } else {
                    let sum = layer.masked_sum(dst, operands);
                    activate(sum, &layer.thresholds[dst]).get() as u32
                };
                b.push(v);
            }
            std::mem::swap(a, b);
        }
        a
    }
}

impl CompiledLayer {
    /// Lays out `[pass | incr | neg]` operand vectors for the layer inputs.
    fn prepare_operands(&self, values: &[u32], operands: &mut Vec<u32>) {
        operands.clear();
        operands.extend_from_slice(values);
        match self.kind {
            LayerKind::First => {
                let max = self.kind.input_max();
                operands.extend(values.iter().map(|&v| (v << INCR_SHIFT).min(max)));
                operands.extend(values.iter().map(|&v| !v & max));
            }
            LayerKind::Cam => {
                // Rows 2 and 3 of the CAM table as arithmetic.
                operands.extend(values.iter().map(|&v| (v + 1).min(3)));
                operands.extend(values.iter().map(|&v| 3 - v));
            }
        }
    }

    #[inline]
    fn masked_sum(&self, dst: usize, operands: &[u32]) -> u32 {
        let n = 3 * self.inputs;
        let masks = &self.masks[dst * n..(dst + 1) * n];
        masks
            .iter()
            .zip(operands)
            .fold(0u32, |acc, (&m, &v)| acc.wrapping_add(m & v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bnn::ops::CAM_TABLE;
    use crate::bnn::{forward, NetworkShape};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn cam_arithmetic_matches_table() {
        for v in 0..4u32 {
            assert_eq!((v + 1).min(3), CAM_TABLE[2][v as usize] as u32);
            assert_eq!(3 - v, CAM_TABLE[3][v as usize] as u32);
        }
    }

    #[test]
    fn compiled_matches_reference_forward() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for shape in ["128-32-32-2", "128-64-128-2", "7-4-1-3", "1-1-1"] {
            let shape: NetworkShape = shape.parse().unwrap();
            for _ in 0..5 {
                let mut g = Genome::random(shape.clone(), &mut rng);
                let p_block = rng.random_range(0.0..1.0);
                for w in g.weights_mut() {
                    if rng.random_bool(p_block) {
                        *w = WeightCode::Block;
                    }
                }
                let net = Network::compile(&g);
                for _ in 0..50 {
                    let x: Vec<InputSample> = (0..shape.input_len())
                        .map(|_| InputSample::new(rng.random_range(0..=127)).unwrap())
                        .collect();
                    assert_eq!(net.forward(&x).unwrap(), forward(&g, &x).unwrap());
                }
            }
        }
    }
}
