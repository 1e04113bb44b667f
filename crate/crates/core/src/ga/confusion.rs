use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fitness::FrameScorer;
use crate::bnn::{ClassLabel, Genome, Network};
use crate::error::{Error, Result};
use crate::sim::{TruthLabel, Waveform};

/// Counts of predictions per true label.
///
/// Rows are the true label (good, ugly, noise), columns the predicted class
/// (Good, Ugly, Either). Noise frames have no one-hot target, so their row is
/// reported as "Either".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub counts: [[u64; 3]; 3],
}

impl ConfusionMatrix {
    pub fn add(&mut self, truth: TruthLabel, predicted: ClassLabel) {
        self.counts[truth.index()][predicted.index()] += 1;
    }

    pub fn row_total(&self, truth: TruthLabel) -> u64 {
        self.counts[truth.index()].iter().sum()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    /// Fraction of good and ugly frames classified correctly; Either counts
    /// as wrong. `None` without any good or ugly frames.
    pub fn accuracy(&self) -> Option<f64> {
        let n = self.row_total(TruthLabel::Good) + self.row_total(TruthLabel::Ugly);
        (n > 0).then(|| (self.counts[0][0] + self.counts[1][1]) as f64 / n as f64)
    }

    fn merge(mut self, other: ConfusionMatrix) -> Self {
        for (a, b) in self
            .counts
            .iter_mut()
            .flatten()
            .zip(other.counts.iter().flatten())
        {
            *a += b;
        }
        self
    }
}

impl fmt::Display for ConfusionMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:>14} {:>8} {:>8} {:>8}",
            "true \\ pred", "Good", "Ugly", "Either"
        )?;
        for (name, row) in ["Good", "Ugly", "Either"].iter().zip(&self.counts) {
            writeln!(f, "{:>14} {:>8} {:>8} {:>8}", name, row[0], row[1], row[2])?;
        }
        Ok(())
    }
}

fn class_from_bits(bits: u64) -> ClassLabel {
    match bits & 0b11 {
        0b01 => ClassLabel::Good,
        0b10 => ClassLabel::Ugly,
        _ => ClassLabel::Either,
    }
}

/// Classifies every frame and tallies the result per true label.
pub fn confusion_matrix(genome: &Genome, dataset: &[Waveform]) -> Result<ConfusionMatrix> {
    if dataset.is_empty() {
        return Err(Error::Empty("evaluation dataset"));
    }
    if genome.shape().output_len() != 2 {
        return Err(Error::ShapeMismatch {
            expected: "2 output neurons".into(),
            actual: format!("{} output neurons", genome.shape().output_len()),
        });
    }
    let net = Network::compile(genome);
    dataset
        .par_chunks(256)
        .map(|chunk| {
            let mut scorer = FrameScorer::default();
            let mut cm = ConfusionMatrix::default();
            for frame in chunk {
                let bits = scorer.predict(&net, frame)?;
                cm.add(frame.label, class_from_bits(bits));
            }
            Ok(cm)
        })
        .try_reduce(ConfusionMatrix::default, |a, b| Ok(a.merge(b)))
}
