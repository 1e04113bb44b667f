use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest value of a quantized input sample (7 bits).
pub const MAX_INPUT: u8 = 127;
/// Largest value of a raw ADC sample (12 bits).
pub const MAX_RAW: u16 = 4095;
/// Largest value of a 2-bit neuron.
pub const MAX_NEURON: u8 = 3;
/// Bits per quantized input sample on the hardware port.
pub const INPUT_BITS: usize = 7;
/// Bits per neuron value on the hardware port.
pub const NEURON_BITS: usize = 2;

/// A 2-bit weight symbol.
///
/// The same code means different things depending on the layer: in the first
/// layer it selects an integer operation on the 7-bit sample, in all later
/// layers it selects a row of the 4x4 CAM table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
#[repr(u8)]
pub enum WeightCode {
    #[default]
    Block = 0,
    Pass = 1,
    Incr = 2,
    Neg = 3,
}

impl WeightCode {
    pub const ALL: [WeightCode; 4] = [
        WeightCode::Block,
        WeightCode::Pass,
        WeightCode::Incr,
        WeightCode::Neg,
    ];

    #[inline]
    pub fn code(self) -> u8 {
        self as u8
    }

    #[inline]
    pub fn is_block(self) -> bool {
        self == WeightCode::Block
    }

    pub fn from_digit(c: char) -> Result<Self> {
        match c {
            '0' => Ok(WeightCode::Block),
            '1' => Ok(WeightCode::Pass),
            '2' => Ok(WeightCode::Incr),
            '3' => Ok(WeightCode::Neg),
            other => Err(Error::InvalidWeightCode(other as u32)),
        }
    }

    pub fn to_digit(self) -> char {
        (b'0' + self.code()) as char
    }
}

impl TryFrom<u8> for WeightCode {
    type Error = Error;

    fn try_from(v: u8) -> Result<Self> {
        WeightCode::ALL
            .get(v as usize)
            .copied()
            .ok_or(Error::InvalidWeightCode(v as u32))
    }
}

impl fmt::Display for WeightCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.code())
    }
}

/// A 2-bit neuron activation, 0..=3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct NeuronValue(u8);

impl NeuronValue {
    pub const ZERO: NeuronValue = NeuronValue(0);

    pub fn new(v: u8) -> Result<Self> {
        if v <= MAX_NEURON {
            Ok(NeuronValue(v))
        } else {
            Err(Error::OutOfRange {
                what: "neuron value",
                value: v as i64,
                max: MAX_NEURON as i64,
            })
        }
    }

    /// Caller guarantees `v <= 3`.
    #[inline]
    pub(crate) const fn new_unchecked(v: u8) -> Self {
        debug_assert!(v <= MAX_NEURON);
        NeuronValue(v)
    }

    #[inline]
    pub fn get(self) -> u8 {
        self.0
    }

    /// One-hot reading of an output neuron: 2 and 3 are "on".
    #[inline]
    pub fn is_on(self) -> bool {
        self.0 >= 2
    }
}

impl TryFrom<u8> for NeuronValue {
    type Error = Error;
    fn try_from(v: u8) -> Result<Self> {
        NeuronValue::new(v)
    }
}

impl fmt::Display for NeuronValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A quantized 7-bit input sample, 0..=127.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct InputSample(u8);

impl InputSample {
    pub fn new(v: u8) -> Result<Self> {
        if v <= MAX_INPUT {
            Ok(InputSample(v))
        } else {
            Err(Error::OutOfRange {
                what: "input sample",
                value: v as i64,
                max: MAX_INPUT as i64,
            })
        }
    }

    #[inline]
    pub(crate) const fn new_unchecked(v: u8) -> Self {
        debug_assert!(v <= MAX_INPUT);
        InputSample(v)
    }

    #[inline]
    pub fn get(self) -> u8 {
        self.0
    }
}

impl TryFrom<u8> for InputSample {
    type Error = Error;
    fn try_from(v: u8) -> Result<Self> {
        InputSample::new(v)
    }
}

/// A raw 12-bit ADC sample, 0..=4095.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize,
)]
#[serde(try_from = "u16", into = "u16")]
pub struct RawSample(u16);

impl RawSample {
    pub fn new(v: u16) -> Result<Self> {
        if v <= MAX_RAW {
            Ok(RawSample(v))
        } else {
            Err(Error::OutOfRange {
                what: "raw sample",
                value: v as i64,
                max: MAX_RAW as i64,
            })
        }
    }

    /// Accepts any integer type, rejecting negatives and values above 4095.
    pub fn from_i64(v: i64) -> Result<Self> {
        if (0..=MAX_RAW as i64).contains(&v) {
            Ok(RawSample(v as u16))
        } else {
            Err(Error::OutOfRange {
                what: "raw sample",
                value: v,
                max: MAX_RAW as i64,
            })
        }
    }

    #[inline]
    pub(crate) const fn new_unchecked(v: u16) -> Self {
        debug_assert!(v <= MAX_RAW);
        RawSample(v)
    }

    #[inline]
    pub fn get(self) -> u16 {
        self.0
    }
}

impl TryFrom<u16> for RawSample {
    type Error = Error;
    fn try_from(v: u16) -> Result<Self> {
        RawSample::new(v)
    }
}

impl From<RawSample> for u16 {
    fn from(v: RawSample) -> u16 {
        v.0
    }
}

/// Sum-domain thresholds splitting a neuron's accumulated sum into four bins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct ActivationThresholds {
    t1: u32,
    t2: u32,
    t3: u32,
}

impl ActivationThresholds {
    pub fn new(t1: u32, t2: u32, t3: u32) -> Result<Self> {
        if t1 <= t2 && t2 <= t3 {
            Ok(ActivationThresholds { t1, t2, t3 })
        } else {
            Err(Error::UnorderedThresholds(t1, t2, t3))
        }
    }

    pub fn t1(&self) -> u32 {
        self.t1
    }
    pub fn t2(&self) -> u32 {
        self.t2
    }
    pub fn t3(&self) -> u32 {
        self.t3
    }

    pub fn as_array(&self) -> [u32; 3] {
        [self.t1, self.t2, self.t3]
    }
}

/// Classification outcome read from the two one-hot output neurons.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ClassLabel {
    Good,
    Ugly,
    Either,
}

impl ClassLabel {
    pub fn index(self) -> usize {
        match self {
            ClassLabel::Good => 0,
            ClassLabel::Ugly => 1,
            ClassLabel::Either => 2,
        }
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClassLabel::Good => "Good",
            ClassLabel::Ugly => "Ugly",
            ClassLabel::Either => "Either",
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weight_code_rejects_out_of_alphabet() {
        for v in 0..=3u8 {
            assert_eq!(WeightCode::try_from(v).unwrap().code(), v);
        }
        assert!(WeightCode::try_from(4).is_err());
        assert!(WeightCode::from_digit('4').is_err());
        assert!(WeightCode::from_digit('x').is_err());
    }

    #[test]
    fn range_checked_newtypes() {
        assert!(NeuronValue::new(3).is_ok());
        assert!(NeuronValue::new(4).is_err());
        assert!(InputSample::new(127).is_ok());
        assert!(InputSample::new(128).is_err());
        assert!(RawSample::new(4095).is_ok());
        assert!(RawSample::new(4096).is_err());
        assert!(RawSample::from_i64(-1).is_err());
        assert!(RawSample::from_i64(5000).is_err());
    }

    #[test]
    fn thresholds_must_be_ordered() {
        assert!(ActivationThresholds::new(3, 6, 9).is_ok());
        assert!(ActivationThresholds::new(0, 0, 0).is_ok());
        assert!(ActivationThresholds::new(4, 3, 9).is_err());
    }

    #[test]
    fn on_off_convention() {
        let on: Vec<bool> = (0..4)
            .map(|v| NeuronValue::new(v).unwrap().is_on())
            .collect();
        assert_eq!(on, [false, false, true, true]);
    }
}
