//! Scalar building blocks of the network. Each one maps onto a LUT, a wire
//! slice or a small comparator in hardware.

use super::types::{
    ActivationThresholds, ClassLabel, InputSample, NeuronValue, RawSample, WeightCode, MAX_INPUT,
};
use crate::error::{Error, Result};

/// 4x4 multiplication table for 2-bit neurons, indexed `[weight][value]`.
pub const CAM_TABLE: [[u8; 4]; 4] = [
    [0, 0, 0, 0], // Block
    [0, 1, 2, 3], // Pass
    [1, 2, 3, 3], // Incr
    [3, 2, 1, 0], // Neg
];

/// Left shift applied by `Incr` in the first layer.
pub const INCR_SHIFT: u32 = 1;

/// Keeps the top 7 bits of a 12-bit sample.
#[inline]
pub fn quantize_12_to_7(raw: RawSample) -> InputSample {
    InputSample::new_unchecked((raw.get() >> 5) as u8)
}

#[inline]
pub fn cam_multiply(w: WeightCode, x: NeuronValue) -> NeuronValue {
    NeuronValue::new_unchecked(CAM_TABLE[w as usize][x.get() as usize])
}

/// Integer-input operation of the first layer. The result stays in 0..=127.
#[inline]
pub fn first_layer_op(w: WeightCode, x: InputSample) -> u8 {
    let x = x.get();
    match w {
        WeightCode::Block => 0,
        WeightCode::Pass => x,
        WeightCode::Incr => ((x as u16) << INCR_SHIFT).min(MAX_INPUT as u16) as u8,
        WeightCode::Neg => !x & MAX_INPUT,
    }
}

/// Sum of `values` by balanced pairwise reduction, `((a+b)+(c+d))`.
///
/// Returns the sum and the number of adder levels, `ceil(log2(len))`.
pub fn tree_sum(values: &[u32]) -> Result<(u64, u32)> {
    if values.is_empty() {
        return Err(Error::Empty("tree_sum operands"));
    }
    let mut level: Vec<u64> = values.iter().map(|&v| v as u64).collect();
    let mut depth = 0;
    while level.len() > 1 {
        level = level.chunks(2).map(|pair| pair.iter().sum()).collect();
        depth += 1;
    }
    Ok((level[0], depth))
}

/// `ceil(log2(n))` for `n >= 1`; 0 for `n <= 1`.
pub fn adder_depth(n: usize) -> u32 {
    if n <= 1 {
        0
    } else {
        usize::BITS - (n - 1).leading_zeros()
    }
}

/// Quartile thresholds of the reachable sum range `[0, nonzero * input_max]`,
/// rounded up.
pub fn thresholds_for(nonzero_count: usize, input_max: u32) -> ActivationThresholds {
    let span = nonzero_count as u64 * input_max as u64;
    let q = |k: u64| (k * span).div_ceil(4) as u32;
    ActivationThresholds::new(q(1), q(2), q(3)).expect("quartiles are ordered")
}

/// Bins a sum into a 2-bit value; each threshold is inclusive on its upper bin.
#[inline]
pub fn activate(sum: u32, th: &ActivationThresholds) -> NeuronValue {
    let v = (sum >= th.t1()) as u8 + (sum >= th.t2()) as u8 + (sum >= th.t3()) as u8;
    NeuronValue::new_unchecked(v)
}

/// Reads the two output neurons as a one-hot pair: index 0 is Good, 1 is Ugly.
pub fn classify(output: &[NeuronValue]) -> Result<ClassLabel> {
    match output {
        [good, ugly] => Ok(match (good.is_on(), ugly.is_on()) {
            (true, false) => ClassLabel::Good,
            (false, true) => ClassLabel::Ugly,
            _ => ClassLabel::Either,
        }),
        _ => Err(Error::ShapeMismatch {
            expected: "2 output neurons".into(),
            actual: format!("{} output neurons", output.len()),
        }),
    }
}
