use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Read};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use anyhow::{bail, ensure, Context, Result};
use lutnet::bnn::{classify, forward_traced, quantize_frame, Genome, RawSample};
use lutnet::ga::{
    confusion_matrix, evaluate_fitness, load_checkpoint, save_checkpoint, write_metrics, GaConfig,
    GenerationRecord, StepOutcome, Trainer,
};
use lutnet::hdl::{emit_entity, estimate_structure};
use lutnet::sim::{gen_batch_seeded, BatchCounts, Dataset, TruthLabel, Waveform};
use serde::Serialize;

use crate::config::{OutputSection, RunConfig};

/// Training stopped by a termination signal after writing a checkpoint.
#[derive(Debug)]
pub struct Interrupted {
    pub generation: usize,
    pub checkpoint: PathBuf,
}

impl fmt::Display for Interrupted {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "interrupted before generation {}; resume with `lutnet resume {}`",
            self.generation,
            self.checkpoint.display()
        )
    }
}

impl std::error::Error for Interrupted {}

pub fn set_workers(n: usize) -> Result<()> {
    ensure!(n >= 1, "--workers must be at least 1");
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .context("cannot start worker pool")
}

fn run_config(config: Option<&Path>, seed: Option<u64>) -> Result<RunConfig> {
    let mut cfg = RunConfig::load_or_default(config)?;
    if let Some(s) = seed {
        cfg.set_seed(s);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn load_genome(path: &Path) -> Result<Genome> {
    Genome::load(path).with_context(|| format!("cannot load genome {}", path.display()))
}

pub fn simulate(
    config: Option<&Path>,
    seed: Option<u64>,
    counts: [usize; 3],
    out: &Path,
) -> Result<()> {
    let cfg = run_config(config, seed)?;
    let counts = BatchCounts::new(counts[0], counts[1], counts[2]);
    let frames = gen_batch_seeded(&cfg.sim, counts, cfg.sim.rng_seed)?;
    let dataset = Dataset {
        config: cfg.sim.clone(),
        seed: cfg.sim.rng_seed,
        frames,
    };
    dataset
        .save(out)
        .with_context(|| format!("cannot write dataset {}", out.display()))?;
    println!(
        "wrote {} frames (good {}, ugly {}, noise {}) to {}",
        counts.total(),
        counts.good,
        counts.ugly,
        counts.noise,
        out.display()
    );
    Ok(())
}

fn write_metrics_file(path: &Path, records: &[GenerationRecord], timing: bool) -> Result<()> {
    let file =
        File::create(path).with_context(|| format!("cannot write metrics {}", path.display()))?;
    write_metrics(BufWriter::new(file), records, timing)?;
    Ok(())
}

fn checkpoint(trainer: &Trainer, output: &OutputSection) -> Result<PathBuf> {
    let path = output.checkpoint_path();
    save_checkpoint(trainer, &path)
        .with_context(|| format!("cannot write checkpoint {}", path.display()))?;
    write_metrics_file(&output.metrics_path(), trainer.records(), output.timing)?;
    Ok(path)
}

fn drive(mut trainer: Trainer, output: &OutputSection) -> Result<()> {
    std::fs::create_dir_all(&output.dir)
        .with_context(|| format!("cannot create output directory {}", output.dir.display()))?;
    let stop = Arc::new(AtomicBool::new(false));
    {
        let stop = Arc::clone(&stop);
        ctrlc::set_handler(move || stop.store(true, Ordering::SeqCst))
            .context("cannot install signal handler")?;
    }

    loop {
        let outcome = trainer.step()?;
        let r = outcome.record();
        eprintln!(
            "gen {:>4}  best_acc {:.4}  mean_acc {:.4}  nonzero {}",
            r.generation, r.best_accuracy, r.mean_accuracy, r.best_nonzero
        );
        if matches!(outcome, StepOutcome::Finished(_)) {
            break;
        }
        if stop.load(Ordering::SeqCst) {
            let path = checkpoint(&trainer, output)?;
            return Err(Interrupted {
                generation: trainer.generation(),
                checkpoint: path,
            }
            .into());
        }
        let every = output.checkpoint_every;
        if every > 0 && trainer.generation().is_multiple_of(every) {
            checkpoint(&trainer, output)?;
        }
    }

    let (best, score) = trainer.best().expect("finished run has a best individual");
    let genome_path = output.genome_path();
    best.save(&genome_path)
        .with_context(|| format!("cannot write genome {}", genome_path.display()))?;
    let metrics_path = output.metrics_path();
    write_metrics_file(&metrics_path, trainer.records(), output.timing)?;
    println!(
        "best genome: accuracy {:.4}, nonzero {} of {} -> {}",
        score.accuracy,
        score.nonzero,
        best.len(),
        genome_path.display()
    );
    println!(
        "metrics: {} generations -> {}",
        trainer.records().len(),
        metrics_path.display()
    );
    Ok(())
}

pub fn train(config: Option<&Path>, seed: Option<u64>, out: Option<&Path>) -> Result<()> {
    let mut cfg = run_config(config, seed)?;
    if let Some(dir) = out {
        cfg.output.dir = dir.to_path_buf();
    }
    let trainer = Trainer::new(cfg.shape()?, cfg.ga.clone(), cfg.sim.clone())?;
    drive(trainer, &cfg.output)
}

pub fn resume(ckpt: &Path, config: Option<&Path>, out: Option<&Path>) -> Result<()> {
    let trainer =
        load_checkpoint(ckpt).with_context(|| format!("cannot resume from {}", ckpt.display()))?;
    let mut output = match config {
        Some(path) => RunConfig::load(path)?.output,
        None => OutputSection {
            dir: ckpt.parent().map(Path::to_path_buf).unwrap_or_default(),
            checkpoint: ckpt.file_name().map(PathBuf::from).unwrap_or_default(),
            ..OutputSection::default()
        },
    };
    if let Some(dir) = out {
        output.dir = dir.to_path_buf();
    }
    eprintln!("resuming at generation {}", trainer.generation());
    drive(trainer, &output)
}

#[derive(Debug, Serialize)]
struct Report {
    genome: String,
    frames: usize,
    good: usize,
    ugly: usize,
    noise: usize,
    /// Partial-credit accuracy on good and ugly frames.
    accuracy: Option<f64>,
    /// Fraction of good and ugly frames classified exactly.
    exact_accuracy: Option<f64>,
    nonzero_weights: usize,
    /// Rows: true good, ugly, noise; columns: predicted Good, Ugly, Either.
    confusion: [[u64; 3]; 3],
}

pub fn evaluate(
    genome_path: &Path,
    data: Option<&Path>,
    config: Option<&Path>,
    seed: Option<u64>,
    counts: [usize; 3],
    out: Option<&Path>,
) -> Result<()> {
    let genome = load_genome(genome_path)?;
    let frames = match data {
        Some(path) => {
            Dataset::load(path)
                .with_context(|| format!("cannot load dataset {}", path.display()))?
                .frames
        }
        None => {
            let cfg = run_config(config, seed)?;
            let counts = BatchCounts::new(counts[0], counts[1], counts[2]);
            gen_batch_seeded(&cfg.sim, counts, cfg.sim.rng_seed)?
        }
    };
    ensure!(!frames.is_empty(), "evaluation dataset is empty");
    let cm = confusion_matrix(&genome, &frames)?;
    let labelled: Vec<Waveform> = frames
        .iter()
        .filter(|f| f.label != TruthLabel::Noise)
        .cloned()
        .collect();
    let accuracy = if labelled.is_empty() {
        None
    } else {
        Some(evaluate_fitness(&genome, &labelled, &GaConfig::default())?.accuracy)
    };
    let report = Report {
        genome: genome_path.display().to_string(),
        frames: frames.len(),
        good: cm.row_total(TruthLabel::Good) as usize,
        ugly: cm.row_total(TruthLabel::Ugly) as usize,
        noise: cm.row_total(TruthLabel::Noise) as usize,
        accuracy,
        exact_accuracy: cm.accuracy(),
        nonzero_weights: genome.nonzero_weight_count(),
        confusion: cm.counts,
    };
    println!(
        "frames {} (good {}, ugly {}, noise {})",
        report.frames, report.good, report.ugly, report.noise
    );
    let fmt = |v: Option<f64>| v.map_or("n/a".to_string(), |a| format!("{a:.4}"));
    println!("accuracy {}", fmt(report.accuracy));
    println!("exact accuracy {}", fmt(report.exact_accuracy));
    print!("{cm}");
    if let Some(path) = out {
        let json = serde_json::to_string_pretty(&report)?;
        std::fs::write(path, json + "\n")
            .with_context(|| format!("cannot write report {}", path.display()))?;
    }
    Ok(())
}

fn parse_samples(text: &str) -> Result<Vec<i64>> {
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .enumerate()
        .map(|(i, s)| {
            s.parse()
                .with_context(|| format!("sample {i}: {s:?} is not an integer"))
        })
        .collect()
}

pub fn infer(
    genome_path: &Path,
    frame: Option<&Path>,
    samples: Option<Vec<i64>>,
    trace: bool,
) -> Result<()> {
    let genome = load_genome(genome_path)?;
    let values = match (frame, samples) {
        (Some(p), _) if p == Path::new("-") => {
            let mut text = String::new();
            std::io::stdin()
                .read_to_string(&mut text)
                .context("cannot read stdin")?;
            parse_samples(&text)?
        }
        (Some(p), _) => parse_samples(
            &std::fs::read_to_string(p)
                .with_context(|| format!("cannot read frame {}", p.display()))?,
        )?,
        (None, Some(s)) => s,
        (None, None) => bail!("give the frame with --frame or --samples"),
    };
    let expected = genome.shape().input_len();
    ensure!(
        values.len() == expected,
        "frame has {} samples, the network takes {expected}",
        values.len()
    );
    let raw = values
        .iter()
        .enumerate()
        .map(|(i, &v)| RawSample::from_i64(v).with_context(|| format!("sample {i}")))
        .collect::<Result<Vec<_>>>()?;
    let (out, tr) = forward_traced(&genome, &quantize_frame(&raw))?;
    let join = |v: &mut dyn Iterator<Item = String>| v.collect::<Vec<_>>().join(" ");
    if trace {
        for (k, layer) in tr.layers.iter().enumerate() {
            println!(
                "layer {} sums   {}",
                k + 1,
                join(&mut layer.sums.iter().map(u32::to_string))
            );
            println!(
                "layer {} values {}",
                k + 1,
                join(&mut layer.values.iter().map(|v| v.get().to_string()))
            );
        }
    }
    println!("label {}", classify(&out)?);
    println!(
        "outputs {}",
        join(&mut out.iter().map(|v| v.get().to_string()))
    );
    Ok(())
}

pub fn emit(genome_path: &Path, out: &Path, name: &str) -> Result<()> {
    let genome = load_genome(genome_path)?;
    let design = emit_entity(&genome, name)?;
    let (pkg, ent) = design
        .write_to(out)
        .with_context(|| format!("cannot write VHDL to {}", out.display()))?;
    let est = estimate_structure(&genome);
    let depths: Vec<String> = design
        .adder_tree_depths
        .iter()
        .map(u32::to_string)
        .collect();
    println!("network {}", genome.shape());
    println!("input port {} bits", design.input_port_bits);
    println!("output port {} bits", design.output_port_bits);
    println!(
        "nonzero weights {} of {}",
        genome.nonzero_weight_count(),
        genome.len()
    );
    println!("adder depths {}", depths.join(" "));
    println!("adders {}, comparators {}", est.adders(), est.comparators());
    println!("wrote {}", pkg.display());
    println!("wrote {}", ent.display());
    Ok(())
}
