use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaConfig {
    pub population_size: usize,
    /// Generations after the initial one; the run evaluates `generations + 1`
    /// populations unless the accuracy target stops it early.
    pub generations: usize,
    pub crossover_prob: f64,
    pub mutation_prob: f64,
    /// Per-gene replacement probability of a mutated individual. Defaults to
    /// `1 / genome length`.
    pub per_gene_mutation_rate: Option<f64>,
    pub tournament_size: usize,
    pub elite_count: usize,
    pub eval_good: usize,
    pub eval_ugly: usize,
    pub accuracy_weight: f64,
    pub size_weight: f64,
    pub rng_seed: u64,
    /// Draw a fresh evaluation batch for every individual in every generation.
    /// When off, one fixed batch is used throughout the run.
    pub resample_each_eval: bool,
    pub target_accuracy: Option<f64>,
}

impl Default for GaConfig {
    fn default() -> Self {
        GaConfig {
            population_size: 200,
            generations: 500,
            crossover_prob: 0.5,
            mutation_prob: 0.2,
            per_gene_mutation_rate: None,
            tournament_size: 3,
            elite_count: 5,
            eval_good: 200,
            eval_ugly: 200,
            accuracy_weight: 10.0,
            size_weight: 1.0,
            rng_seed: 0,
            resample_each_eval: true,
            target_accuracy: None,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<()> {
        let prob = |field: &str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::config(field, format!("{v} is not a probability")))
            }
        };
        if self.population_size < 2 {
            return Err(Error::config("ga.population_size", "must be >= 2"));
        }
        if self.elite_count >= self.population_size {
            return Err(Error::config("ga.elite_count", "must be < population_size"));
        }
        if self.tournament_size < 1 {
            return Err(Error::config("ga.tournament_size", "must be >= 1"));
        }
        prob("ga.crossover_prob", self.crossover_prob)?;
        prob("ga.mutation_prob", self.mutation_prob)?;
        if let Some(r) = self.per_gene_mutation_rate {
            prob("ga.per_gene_mutation_rate", r)?;
        }
        if let Some(t) = self.target_accuracy {
            prob("ga.target_accuracy", t)?;
        }
        if self.eval_good + self.eval_ugly == 0 {
            return Err(Error::config(
                "ga.eval_good",
                "evaluation set would be empty",
            ));
        }
        if !(self.accuracy_weight.is_finite() && self.size_weight.is_finite()) {
            return Err(Error::config(
                "ga.accuracy_weight",
                "weights must be finite",
            ));
        }
        Ok(())
    }

    pub fn gene_rate(&self, genome_len: usize) -> f64 {
        self.per_gene_mutation_rate
            .unwrap_or(1.0 / genome_len.max(1) as f64)
    }
}
