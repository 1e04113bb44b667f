//! The generational loop: evaluate, keep elites, select, vary.
//!
//! Every random decision is drawn from a stream keyed by its position in the
//! run (generation, individual), so a run is reproducible from the seed alone,
//! evaluation can be spread over any number of threads, and a checkpoint only
//! needs the population and the generation index.

use std::cmp::Ordering;
use std::time::Instant;

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::GaConfig;
use super::fitness::{accuracy_on, FitnessScore};
use super::operators::{crossover, mutate, tournament_index};
use crate::bnn::{Genome, Network, NetworkShape};
use crate::error::{Error, Result};
use crate::seed::{derive_seed, stream_rng};
use crate::sim::{gen_batch_serial, BatchCounts, SimConfig, Waveform};

const STREAM_INIT: u64 = 1;
const STREAM_EVAL: u64 = 2;
const STREAM_VARY: u64 = 3;
const STREAM_FIXED_SET: u64 = 4;

/// Summary of one evaluated generation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub generation: usize,
    /// Highest accuracy in the population.
    pub best_accuracy: f64,
    pub mean_accuracy: f64,
    /// Highest scalar fitness in the population.
    pub best_scalar: f64,
    /// Nonzero weights of the highest-scalar individual.
    pub best_nonzero: usize,
    pub best_nonzero_fraction: f64,
    pub wall_seconds: f64,
}

/// Resumable GA state.
#[derive(Debug, Clone)]
pub struct Trainer {
    shape: NetworkShape,
    ga: GaConfig,
    sim: SimConfig,
    /// Index of the generation `population` belongs to.
    generation: usize,
    population: Vec<Genome>,
    records: Vec<GenerationRecord>,
    fixed_set: Option<Vec<Waveform>>,
    last_eval: Option<Vec<FitnessScore>>,
    finished: bool,
    elapsed_before: f64,
    started: Instant,
}

/// What [`Trainer::step`] did.
#[derive(Debug, Clone, PartialEq)]
pub enum StepOutcome {
    /// A generation was evaluated and the next population is ready.
    Continue(GenerationRecord),
    /// The final generation was evaluated.
    Finished(GenerationRecord),
}

impl StepOutcome {
    pub fn record(&self) -> &GenerationRecord {
        match self {
            StepOutcome::Continue(r) | StepOutcome::Finished(r) => r,
        }
    }
}

/// Indices sorted by descending scalar, ties by ascending index.
fn ranking(scores: &[FitnessScore]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| {
        scores[b]
            .scalar
            .partial_cmp(&scores[a].scalar)
            .unwrap_or(Ordering::Equal)
            .then(a.cmp(&b))
    });
    idx
}

impl Trainer {
    pub fn new(shape: NetworkShape, ga: GaConfig, sim: SimConfig) -> Result<Self> {
        ga.validate()?;
        sim.validate()?;
        if shape.output_len() != 2 {
            return Err(Error::config(
                "shape",
                "training needs exactly 2 output neurons",
            ));
        }
        if shape.input_len() != sim.frame_len {
            return Err(Error::config(
                "shape",
                format!(
                    "input_len {} differs from sim.frame_len {}",
                    shape.input_len(),
                    sim.frame_len
                ),
            ));
        }
        let population = (0..ga.population_size)
            .map(|i| {
                let mut rng = stream_rng(derive_seed(ga.rng_seed, &[STREAM_INIT]), i as u64);
                Genome::random(shape.clone(), &mut rng)
            })
            .collect();
        Ok(Self::from_parts(shape, ga, sim, 0, population, Vec::new()))
    }

    /// Rebuilds a trainer from saved state; used by checkpoints.
    pub fn from_parts(
        shape: NetworkShape,
        ga: GaConfig,
        sim: SimConfig,
        generation: usize,
        population: Vec<Genome>,
        records: Vec<GenerationRecord>,
    ) -> Self {
        let elapsed_before = records.last().map_or(0.0, |r| r.wall_seconds);
        let fixed_set = (!ga.resample_each_eval).then(|| {
            let counts = BatchCounts::new(ga.eval_good, ga.eval_ugly, 0);
            gen_batch_serial(&sim, counts, derive_seed(ga.rng_seed, &[STREAM_FIXED_SET]))
        });
        Trainer {
            shape,
            ga,
            sim,
            generation,
            population,
            records,
            fixed_set,
            last_eval: None,
            finished: false,
            elapsed_before,
            started: Instant::now(),
        }
    }

    pub fn shape(&self) -> &NetworkShape {
        &self.shape
    }
    pub fn ga_config(&self) -> &GaConfig {
        &self.ga
    }
    pub fn sim_config(&self) -> &SimConfig {
        &self.sim
    }
    pub fn generation(&self) -> usize {
        self.generation
    }
    pub fn population(&self) -> &[Genome] {
        &self.population
    }
    pub fn records(&self) -> &[GenerationRecord] {
        &self.records
    }
    pub fn is_finished(&self) -> bool {
        self.finished
    }

    /// Scores of the most recently evaluated generation.
    pub fn last_scores(&self) -> Option<&[FitnessScore]> {
        self.last_eval.as_deref()
    }

    /// Seed of the evaluation batch for one individual of one generation.
    pub fn eval_seed(&self, generation: usize, individual: usize) -> u64 {
        derive_seed(
            self.ga.rng_seed,
            &[STREAM_EVAL, generation as u64, individual as u64],
        )
    }

    fn evaluate_one(&self, index: usize, genome: &Genome) -> Result<FitnessScore> {
        let net = Network::compile(genome);
        let accuracy = match &self.fixed_set {
            Some(set) => accuracy_on(&net, set)?,
            None => {
                let counts = BatchCounts::new(self.ga.eval_good, self.ga.eval_ugly, 0);
                let frames =
                    gen_batch_serial(&self.sim, counts, self.eval_seed(self.generation, index));
                accuracy_on(&net, &frames)?
            }
        };
        Ok(FitnessScore::new(
            accuracy,
            genome.nonzero_weight_count(),
            genome.len(),
            &self.ga,
        ))
    }

    /// Evaluates the current population on the current rayon pool.
    pub fn evaluate(&self) -> Result<Vec<FitnessScore>> {
        self.population
            .par_iter()
            .enumerate()
            .map(|(i, g)| self.evaluate_one(i, g))
            .collect()
    }

    fn summarize(&self, scores: &[FitnessScore]) -> GenerationRecord {
        let best = ranking(scores)[0];
        let n = scores.len() as f64;
        GenerationRecord {
            generation: self.generation,
            best_accuracy: scores.iter().map(|s| s.accuracy).fold(f64::MIN, f64::max),
            mean_accuracy: scores.iter().map(|s| s.accuracy).sum::<f64>() / n,
            best_scalar: scores[best].scalar,
            best_nonzero: scores[best].nonzero,
            best_nonzero_fraction: scores[best].nonzero as f64 / self.population[best].len() as f64,
            wall_seconds: self.elapsed_before + self.started.elapsed().as_secs_f64(),
        }
    }

    /// Elites followed by selected and varied offspring.
    fn next_population(&self, scores: &[FitnessScore]) -> Result<Vec<Genome>> {
        let n = self.ga.population_size;
        let rank = ranking(scores);
        let mut next: Vec<Genome> = rank[..self.ga.elite_count]
            .iter()
            .map(|&i| self.population[i].clone())
            .collect();

        let mut rng = stream_rng(
            derive_seed(self.ga.rng_seed, &[STREAM_VARY]),
            self.generation as u64,
        );
        let mut offspring: Vec<Genome> = (0..n - self.ga.elite_count)
            .map(|_| {
                self.population[tournament_index(scores, self.ga.tournament_size, &mut rng)].clone()
            })
            .collect();
        for i in (1..offspring.len()).step_by(2) {
            if rng.random_bool(self.ga.crossover_prob) {
                let (a, b) = crossover(&offspring[i - 1], &offspring[i], &mut rng)?;
                offspring[i - 1] = a;
                offspring[i] = b;
            }
        }
        let rate = self.ga.gene_rate(self.shape.total_weights());
        for child in &mut offspring {
            if rng.random_bool(self.ga.mutation_prob) {
                mutate(child, rate, &mut rng);
            }
        }
        next.extend(offspring);
        Ok(next)
    }

    /// Evaluates the current generation and, unless the run is over, breeds
    /// the next one.
    pub fn step(&mut self) -> Result<StepOutcome> {
        if self.finished {
            return Err(Error::config("ga", "training already finished"));
        }
        let scores = self.evaluate()?;
        let record = self.summarize(&scores);
        self.records.push(record.clone());
        let target_hit = self
            .ga
            .target_accuracy
            .is_some_and(|t| record.best_accuracy >= t);
        if self.generation >= self.ga.generations || target_hit {
            self.finished = true;
            self.last_eval = Some(scores);
            return Ok(StepOutcome::Finished(record));
        }
        self.population = self.next_population(&scores)?;
        self.generation += 1;
        self.last_eval = Some(scores);
        Ok(StepOutcome::Continue(record))
    }

    /// Highest-scalar individual of the final evaluated generation.
    pub fn best(&self) -> Option<(&Genome, FitnessScore)> {
        if !self.finished {
            return None;
        }
        let scores = self.last_eval.as_ref()?;
        let i = ranking(scores)[0];
        Some((&self.population[i], scores[i]))
    }

    /// Runs to completion.
    pub fn run(&mut self) -> Result<(Genome, Vec<GenerationRecord>)> {
        while !self.finished {
            self.step()?;
        }
        let (best, _) = self.best().expect("finished run has a best individual");
        Ok((best.clone(), self.records.clone()))
    }
}

/// Trains from scratch and returns the best genome with one record per
/// evaluated generation.
pub fn evolve(
    shape: &NetworkShape,
    cfg: &GaConfig,
    sim: &SimConfig,
) -> Result<(Genome, Vec<GenerationRecord>)> {
    Trainer::new(shape.clone(), cfg.clone(), sim.clone())?.run()
}
