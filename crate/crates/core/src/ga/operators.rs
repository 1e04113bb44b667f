use rand::Rng;

use super::fitness::FitnessScore;
use crate::bnn::{Genome, WeightCode};
use crate::error::{Error, Result};

/// Index of the highest-scalar individual among `k` uniform draws with
/// replacement. Ties go to the earliest draw.
pub fn tournament_index<R: Rng + ?Sized>(scores: &[FitnessScore], k: usize, rng: &mut R) -> usize {
    assert!(!scores.is_empty(), "tournament over an empty population");
    let mut best = rng.random_range(0..scores.len());
    for _ in 1..k {
        let c = rng.random_range(0..scores.len());
        if scores[c].scalar > scores[best].scalar {
            best = c;
        }
    }
    best
}

pub fn tournament_select<'a, R: Rng + ?Sized>(
    population: &'a [Genome],
    scores: &[FitnessScore],
    k: usize,
    rng: &mut R,
) -> &'a Genome {
    &population[tournament_index(scores, k, rng)]
}

/// Replaces each gene, with probability `rate`, by a different code drawn
/// uniformly from the other three.
pub fn mutate<R: Rng + ?Sized>(genome: &mut Genome, rate: f64, rng: &mut R) {
    if rate <= 0.0 {
        return;
    }
    for w in genome.weights_mut() {
        if rng.random_bool(rate) {
            let step = rng.random_range(1..4u8);
            *w = WeightCode::ALL[((w.code() + step) % 4) as usize];
        }
    }
}

/// Two-point crossover: children exchange the genes in `lo..hi`.
pub fn crossover_at(a: &Genome, b: &Genome, lo: usize, hi: usize) -> Result<(Genome, Genome)> {
    if a.shape() != b.shape() {
        return Err(Error::ShapeMismatch {
            expected: a.shape().to_string(),
            actual: b.shape().to_string(),
        });
    }
    assert!(lo <= hi && hi <= a.len(), "cut points out of order");
    let mut c1 = a.clone();
    let mut c2 = b.clone();
    c1.weights_mut()[lo..hi].copy_from_slice(&b.weights()[lo..hi]);
    c2.weights_mut()[lo..hi].copy_from_slice(&a.weights()[lo..hi]);
    Ok((c1, c2))
}

/// Two-point crossover with cut points drawn uniformly from `0..=len`.
pub fn crossover<R: Rng + ?Sized>(a: &Genome, b: &Genome, rng: &mut R) -> Result<(Genome, Genome)> {
    let len = a.len();
    let x = rng.random_range(0..=len);
    let y = rng.random_range(0..=len);
    crossover_at(a, b, x.min(y), x.max(y))
}
