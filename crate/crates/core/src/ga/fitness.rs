use serde::{Deserialize, Serialize};

use super::config::GaConfig;
use crate::bnn::{Genome, Network, NeuronValue, Scratch, MAX_RAW};
use crate::error::{Error, Result};
use crate::sim::{TruthLabel, Waveform};

/// Fitness of one individual on one evaluation set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitnessScore {
    pub accuracy: f64,
    pub nonzero: usize,
    pub scalar: f64,
}

impl FitnessScore {
    /// `accuracy_weight * accuracy - size_weight * nonzero / total`.
    pub fn new(accuracy: f64, nonzero: usize, total_weights: usize, cfg: &GaConfig) -> Self {
        let fraction = nonzero as f64 / total_weights as f64;
        FitnessScore {
            accuracy,
            nonzero,
            scalar: cfg.accuracy_weight * accuracy - cfg.size_weight * fraction,
        }
    }
}

/// Fraction of positions where `pred` and `target` agree.
pub fn score_prediction(pred: &[bool], target: &[bool]) -> Result<f64> {
    if pred.len() != target.len() {
        return Err(Error::ShapeMismatch {
            expected: format!("tuple of length {}", target.len()),
            actual: format!("tuple of length {}", pred.len()),
        });
    }
    if pred.is_empty() {
        return Err(Error::Empty("prediction tuple"));
    }
    let hits = pred.iter().zip(target).filter(|(p, t)| p == t).count();
    Ok(hits as f64 / pred.len() as f64)
}

/// One-hot reading of output neurons: values 2 and 3 are on.
pub fn one_hot_bits(output: &[NeuronValue]) -> Vec<bool> {
    output.iter().map(|v| v.is_on()).collect()
}

/// Desired output tuple for a labeled frame: Good is `(1, 0)`, Ugly `(0, 1)`.
pub fn target_bits(label: TruthLabel) -> Option<[bool; 2]> {
    match label {
        TruthLabel::Good => Some([true, false]),
        TruthLabel::Ugly => Some([false, true]),
        TruthLabel::Noise => None,
    }
}

/// Running accuracy with the broken-clock guard: if every prediction tuple is
/// identical the accuracy is forced to zero.
#[derive(Debug, Default)]
pub(crate) struct AccuracyTally {
    total: f64,
    count: usize,
    first: Option<u64>,
    varied: bool,
}

impl AccuracyTally {
    /// `bits` is the prediction packed LSB-first, `len` its tuple length.
    fn push(&mut self, bits: u64, target: u64, len: usize) {
        let hits = len as u32 - (bits ^ target).count_ones();
        self.total += hits as f64 / len as f64;
        self.count += 1;
        match self.first {
            None => self.first = Some(bits),
            Some(f) if f != bits => self.varied = true,
            _ => {}
        }
    }

    fn accuracy(&self) -> Result<f64> {
        if self.count == 0 {
            return Err(Error::Empty("evaluation dataset"));
        }
        if !self.varied {
            return Ok(0.0);
        }
        Ok(self.total / self.count as f64)
    }
}

/// Reusable per-thread evaluation state.
#[derive(Debug, Default)]
pub(crate) struct FrameScorer {
    scratch: Scratch,
    x: Vec<u8>,
}

impl FrameScorer {
    /// Quantizes and runs one frame; returns the one-hot bits packed LSB-first.
    pub(crate) fn predict(&mut self, net: &Network, frame: &Waveform) -> Result<u64> {
        if frame.samples.len() != net.input_len() {
            return Err(Error::ShapeMismatch {
                expected: format!("{} samples per frame", net.input_len()),
                actual: format!("{} samples", frame.samples.len()),
            });
        }
        self.x.clear();
        self.x.extend(frame.samples.iter().map(|s| {
            debug_assert!(s.get() <= MAX_RAW);
            (s.get() >> 5) as u8
        }));
        let out = net.run(&self.x, &mut self.scratch);
        Ok(out
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, &v)| acc | (((v >= 2) as u64) << i)))
    }
}

pub(crate) fn accuracy_on<'a, I>(net: &Network, frames: I) -> Result<f64>
where
    I: IntoIterator<Item = &'a Waveform>,
{
    let mut scorer = FrameScorer::default();
    let mut tally = AccuracyTally::default();
    for frame in frames {
        let target = target_bits(frame.label).ok_or_else(|| {
            Error::config(
                "dataset",
                "fitness evaluation accepts only good and ugly frames",
            )
        })?;
        let bits = scorer.predict(net, frame)?;
        let target = target[0] as u64 | (target[1] as u64) << 1;
        tally.push(bits, target, 2);
    }
    tally.accuracy()
}

/// Mean partial-credit score of `genome` over `dataset`, zero for constant
/// predictors, combined with the size penalty into the scalar fitness.
pub fn evaluate_fitness(
    genome: &Genome,
    dataset: &[Waveform],
    cfg: &GaConfig,
) -> Result<FitnessScore> {
    if genome.shape().output_len() != 2 {
        return Err(Error::ShapeMismatch {
            expected: "2 output neurons".into(),
            actual: format!("{} output neurons", genome.shape().output_len()),
        });
    }
    let net = Network::compile(genome);
    let accuracy = accuracy_on(&net, dataset)?;
    Ok(FitnessScore::new(
        accuracy,
        genome.nonzero_weight_count(),
        genome.len(),
        cfg,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bnn::{NetworkShape, RawSample, WeightCode};

    fn b(v: &[u8]) -> Vec<bool> {
        v.iter().map(|&x| x == 1).collect()
    }

    #[test]
    fn partial_credit_examples() {
        let t = b(&[1, 0]);
        assert_eq!(score_prediction(&b(&[1, 0]), &t).unwrap(), 1.0);
        assert_eq!(score_prediction(&b(&[1, 1]), &t).unwrap(), 0.5);
        assert_eq!(score_prediction(&b(&[0, 0]), &t).unwrap(), 0.5);
        assert_eq!(score_prediction(&b(&[0, 1]), &t).unwrap(), 0.0);
        let t10 = b(&[0, 0, 0, 0, 0, 0, 0, 0, 0, 1]);
        assert_eq!(score_prediction(&t10, &t10).unwrap(), 1.0);
        let p10 = b(&[0, 0, 0, 0, 0, 0, 1, 0, 0, 1]);
        assert_eq!(score_prediction(&p10, &t10).unwrap(), 0.9);
        assert!(score_prediction(&b(&[1]), &t).is_err());
        assert!(score_prediction(&[], &[]).is_err());
    }

    #[test]
    fn score_is_symmetric_and_quantized() {
        for len in 1..=6usize {
            for p in 0..(1u32 << len) {
                for t in 0..(1u32 << len) {
                    let pb: Vec<bool> = (0..len).map(|i| p >> i & 1 == 1).collect();
                    let tb: Vec<bool> = (0..len).map(|i| t >> i & 1 == 1).collect();
                    let s = score_prediction(&pb, &tb).unwrap();
                    assert_eq!(s, score_prediction(&tb, &pb).unwrap());
                    assert!((0.0..=1.0).contains(&s));
                    let steps = s * len as f64;
                    assert!((steps - steps.round()).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn one_hot_reading() {
        let nv = |a: u8, c: u8| [NeuronValue::new(a).unwrap(), NeuronValue::new(c).unwrap()];
        assert_eq!(one_hot_bits(&nv(0, 3)), vec![false, true]);
        assert_eq!(one_hot_bits(&nv(1, 1)), vec![false, false]);
        assert_eq!(one_hot_bits(&nv(2, 2)), vec![true, true]);
    }

    fn frame(level: u16, label: TruthLabel) -> Waveform {
        Waveform {
            samples: vec![RawSample::new(level).unwrap(); 1],
            label,
        }
    }

    /// 1-2-2 net: the hidden neuron copies the input bin, output 0 passes it,
    /// output 1 negates it. Input bins map to outputs:
    /// x in 0..32 -> (0,3), 32..64 -> (1,2), 64..96 -> (2,1), 96.. -> (3,0).
    fn probe_net() -> Genome {
        let shape = NetworkShape::new(1, vec![1], 2).unwrap();
        Genome::new(
            shape,
            vec![WeightCode::Pass, WeightCode::Pass, WeightCode::Neg],
        )
        .unwrap()
    }

    #[test]
    fn hand_built_four_frame_set() {
        let g = probe_net();
        let cfg = GaConfig::default();
        // Raw levels are quantized by 32: 3200 -> 100 (bin 3), 2400 -> 75
        // (bin 2), 1200 -> 37 (bin 1), 320 -> 10 (bin 0).
        let ds = vec![
            frame(3200, TruthLabel::Good), // pred (1,0) vs (1,0): 1.0
            frame(2400, TruthLabel::Ugly), // pred (1,0) vs (0,1): 0.0
            frame(1200, TruthLabel::Good), // pred (0,1) vs (1,0): 0.0
            frame(320, TruthLabel::Ugly),  // pred (0,1) vs (0,1): 1.0
        ];
        let s = evaluate_fitness(&g, &ds, &cfg).unwrap();
        assert_eq!(s.accuracy, (1.0 + 0.0 + 0.0 + 1.0) / 4.0);
        assert_eq!(s.nonzero, 3);
        assert_eq!(s.scalar, 10.0 * 0.5 - 1.0);
    }

    #[test]
    fn constant_output_scores_zero() {
        let g = probe_net();
        let cfg = GaConfig::default();
        // Same bin everywhere: predictions are all (1,0), which would score 0.5.
        let ds = vec![frame(3200, TruthLabel::Good), frame(3300, TruthLabel::Ugly)];
        assert_eq!(evaluate_fitness(&g, &ds, &cfg).unwrap().accuracy, 0.0);
        let blocked = Genome::filled(g.shape().clone(), WeightCode::Block);
        let ds = vec![frame(0, TruthLabel::Good), frame(4095, TruthLabel::Ugly)];
        assert_eq!(evaluate_fitness(&blocked, &ds, &cfg).unwrap().accuracy, 0.0);
    }

    #[test]
    fn perfect_classifier_scalar() {
        let g = probe_net();
        let cfg = GaConfig::default();
        let ds = vec![frame(3200, TruthLabel::Good), frame(320, TruthLabel::Ugly)];
        let s = evaluate_fitness(&g, &ds, &cfg).unwrap();
        assert_eq!(s.accuracy, 1.0);
        assert_eq!(s.scalar, cfg.accuracy_weight - cfg.size_weight * 3.0 / 3.0);
    }

    #[test]
    fn empty_or_noise_dataset_rejected() {
        let g = probe_net();
        let cfg = GaConfig::default();
        assert!(evaluate_fitness(&g, &[], &cfg).is_err());
        assert!(evaluate_fitness(&g, &[frame(1, TruthLabel::Noise)], &cfg).is_err());
    }

    #[test]
    fn fewer_weights_win_at_equal_accuracy() {
        let cfg = GaConfig::default();
        for acc in [0.0, 0.37, 0.5, 1.0] {
            for n in 0..100 {
                let small = FitnessScore::new(acc, n, 5184, &cfg);
                let big = FitnessScore::new(acc, n + 1, 5184, &cfg);
                assert!(small.scalar > big.scalar);
            }
        }
    }
}
