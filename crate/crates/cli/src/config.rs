use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use lutnet::bnn::NetworkShape;
use lutnet::ga::GaConfig;
use lutnet::sim::SimConfig;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NetworkSection {
    /// Layer widths, input first, e.g. `"128-32-32-2"`.
    pub shape: String,
}

impl Default for NetworkSection {
    fn default() -> Self {
        NetworkSection {
            shape: "128-32-32-2".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    /// Directory for every training artifact; relative names below resolve
    /// against it.
    pub dir: PathBuf,
    pub genome: PathBuf,
    pub metrics: PathBuf,
    pub checkpoint: PathBuf,
    /// Generations between checkpoints; 0 disables periodic checkpoints.
    pub checkpoint_every: usize,
    /// Add a `wall_seconds` column to the metrics CSV. Off by default so the
    /// file is reproducible byte for byte.
    pub timing: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            dir: PathBuf::from("runs/default"),
            genome: PathBuf::from("best.genome"),
            metrics: PathBuf::from("metrics.csv"),
            checkpoint: PathBuf::from("train.ckpt"),
            checkpoint_every: 25,
            timing: false,
        }
    }
}

impl OutputSection {
    pub fn genome_path(&self) -> PathBuf {
        self.dir.join(&self.genome)
    }

    pub fn metrics_path(&self) -> PathBuf {
        self.dir.join(&self.metrics)
    }

    pub fn checkpoint_path(&self) -> PathBuf {
        self.dir.join(&self.checkpoint)
    }
}

/// Everything one run needs: network, simulator, GA and output locations.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub network: NetworkSection,
    pub sim: SimConfig,
    pub ga: GaConfig,
    pub output: OutputSection,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("invalid config {}", path.display()))
    }

    /// Reads `path` if given, otherwise starts from defaults.
    pub fn load_or_default(path: Option<&Path>) -> Result<Self> {
        path.map_or_else(|| Ok(RunConfig::default()), RunConfig::load)
    }

    /// Applies the seed to both the simulator and the GA.
    pub fn set_seed(&mut self, seed: u64) {
        self.sim.rng_seed = seed;
        self.ga.rng_seed = seed;
    }

    pub fn shape(&self) -> Result<NetworkShape> {
        self.network
            .shape
            .parse()
            .with_context(|| format!("network.shape {:?}", self.network.shape))
    }

    pub fn validate(&self) -> Result<()> {
        self.shape()?;
        self.sim.validate()?;
        self.ga.validate()?;
        Ok(())
    }
}
