//! Resumable training state.
//!
//! A checkpoint is one header line followed by a JSON payload:
//!
//! ```text
//! lutnet-checkpoint v1 sha256=<hex digest of the payload bytes>
//! {"shape":...,"ga":...,"sim":...,"generation":...,"population":[...],"records":[...]}
//! ```
//!
//! RNG streams are derived from `(seed, generation, individual)`, so the
//! generation index together with the seed is the complete random state.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::GaConfig;
use super::evolve::{GenerationRecord, Trainer};
use crate::bnn::{Genome, NetworkShape};
use crate::error::{Error, Result};
use crate::sim::SimConfig;

pub const CHECKPOINT_VERSION: u32 = 1;
const TAG: &str = "lutnet-checkpoint";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Payload {
    shape: NetworkShape,
    ga: GaConfig,
    sim: SimConfig,
    /// Next generation to evaluate.
    generation: usize,
    /// Weight digit strings, one per individual.
    population: Vec<String>,
    records: Vec<GenerationRecord>,
}

fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Serializes the trainer. Only valid between generations, which is the only
/// state a [`Trainer`] is ever observed in.
pub fn checkpoint_text(trainer: &Trainer) -> String {
    let payload = Payload {
        shape: trainer.shape().clone(),
        ga: trainer.ga_config().clone(),
        sim: trainer.sim_config().clone(),
        generation: trainer.generation(),
        population: trainer
            .population()
            .iter()
            .map(|g| g.weight_digits())
            .collect(),
        records: trainer.records().to_vec(),
    };
    let body = serde_json::to_string(&payload).expect("checkpoint payload serializes");
    format!(
        "{TAG} v{CHECKPOINT_VERSION} sha256={}\n{body}\n",
        digest(body.as_bytes())
    )
}

pub fn restore_checkpoint(text: &str) -> Result<Trainer> {
    let (header, body) = text
        .split_once('\n')
        .ok_or_else(|| Error::format("checkpoint", "missing header line"))?;
    let body = body.strip_suffix('\n').unwrap_or(body);
    let mut parts = header.split(' ');
    if parts.next() != Some(TAG) {
        return Err(Error::format("checkpoint", "not a checkpoint file"));
    }
    let version = parts.next().unwrap_or_default();
    if version != format!("v{CHECKPOINT_VERSION}") {
        return Err(Error::format(
            "checkpoint",
            format!("unsupported version {version:?}"),
        ));
    }
    let expected = parts
        .next()
        .and_then(|p| p.strip_prefix("sha256="))
        .ok_or_else(|| Error::format("checkpoint", "missing checksum"))?;
    let computed = digest(body.as_bytes());
    if computed != expected {
        return Err(Error::Checksum {
            expected: expected.to_string(),
            computed,
        });
    }
    let p: Payload =
        serde_json::from_str(body).map_err(|e| Error::format("checkpoint", e.to_string()))?;
    p.ga.validate()?;
    p.sim.validate()?;
    if p.population.len() != p.ga.population_size {
        return Err(Error::format(
            "checkpoint",
            "population size differs from config",
        ));
    }
    let population = p
        .population
        .iter()
        .map(|d| Genome::from_digits(p.shape.clone(), d))
        .collect::<Result<Vec<_>>>()?;
    Ok(Trainer::from_parts(
        p.shape,
        p.ga,
        p.sim,
        p.generation,
        population,
        p.records,
    ))
}

pub fn save_checkpoint(trainer: &Trainer, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    // Write-then-rename so an interrupted save never leaves a torn file.
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, checkpoint_text(trainer))?;
    std::fs::rename(tmp, path)?;
    Ok(())
}

pub fn load_checkpoint(path: impl AsRef<Path>) -> Result<Trainer> {
    restore_checkpoint(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trainer() -> Trainer {
        let ga = GaConfig {
            population_size: 8,
            generations: 6,
            elite_count: 2,
            eval_good: 8,
            eval_ugly: 8,
            rng_seed: 5,
            ..GaConfig::default()
        };
        Trainer::new(
            NetworkShape::new(128, vec![4], 2).unwrap(),
            ga,
            SimConfig::default(),
        )
        .unwrap()
    }

    fn strip_time(r: &[GenerationRecord]) -> Vec<GenerationRecord> {
        r.iter()
            .cloned()
            .map(|mut r| {
                r.wall_seconds = 0.0;
                r
            })
            .collect()
    }

    #[test]
    fn resume_continues_bit_identically() {
        let mut reference = trainer();
        let (best_ref, records_ref) = reference.run().unwrap();

        let mut t = trainer();
        for _ in 0..3 {
            t.step().unwrap();
        }
        let text = checkpoint_text(&t);
        drop(t);
        let mut resumed = restore_checkpoint(&text).unwrap();
        assert_eq!(resumed.generation(), 3);
        let (best, records) = resumed.run().unwrap();
        assert_eq!(best, best_ref);
        assert_eq!(strip_time(&records), strip_time(&records_ref));
    }

    #[test]
    fn corruption_detected() {
        let text = checkpoint_text(&trainer());
        let tampered = text.replacen("\"generation\":0", "\"generation\":1", 1);
        assert_ne!(tampered, text);
        assert!(matches!(
            restore_checkpoint(&tampered),
            Err(Error::Checksum { .. })
        ));
        assert!(restore_checkpoint("garbage").is_err());
        assert!(restore_checkpoint(&text.replacen("v1", "v7", 1)).is_err());
    }

    #[test]
    fn save_and_load_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.ckpt");
        let t = trainer();
        save_checkpoint(&t, &path).unwrap();
        let back = load_checkpoint(&path).unwrap();
        assert_eq!(back.population(), t.population());
    }
}
