//! Genetic-algorithm training: partial-credit fitness on resampled waveform
//! sets, elitist generational loop, scalarized accuracy-vs-size objective.

mod checkpoint;
mod config;
mod confusion;
mod evolve;
mod fitness;
mod metrics;
mod operators;

pub use checkpoint::{
    checkpoint_text, load_checkpoint, restore_checkpoint, save_checkpoint, CHECKPOINT_VERSION,
};
pub use config::GaConfig;
pub use confusion::{confusion_matrix, ConfusionMatrix};
pub use evolve::{evolve, GenerationRecord, StepOutcome, Trainer};
pub use fitness::{evaluate_fitness, one_hot_bits, score_prediction, target_bits, FitnessScore};
pub use metrics::{metrics_csv, read_metrics, write_metrics, MetricsRow};
pub use operators::{crossover, crossover_at, mutate, tournament_index, tournament_select};
