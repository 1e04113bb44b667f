mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "lutnet",
    version,
    about = "LUT-constrained 2-bit networks for SiPM pulse classification"
)]
struct Cli {
    /// Worker threads for evaluation; results do not depend on it.
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct ConfigArgs {
    /// Run configuration (TOML). Defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides both `sim.rng_seed` and `ga.rng_seed`.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a labelled waveform dataset.
    Simulate {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long, default_value_t = 200)]
        good: usize,
        #[arg(long, default_value_t = 200)]
        ugly: usize,
        #[arg(long, default_value_t = 0)]
        noise: usize,
        /// Output file; a `.bin` extension selects the binary format.
        #[arg(long)]
        out: PathBuf,
    },
    /// Train a network with the genetic algorithm.
    Train {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Output directory, overriding `output.dir`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Continue from a checkpoint instead of starting fresh.
        #[arg(long)]
        resume: Option<PathBuf>,
    },
    /// Continue an interrupted training run.
    Resume {
        checkpoint: PathBuf,
        /// Output locations; the checkpoint supplies network, simulator and GA.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory; defaults to the checkpoint's directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Accuracy and confusion matrix of a genome.
    Evaluate {
        genome: PathBuf,
        /// Dataset file; a fresh set is simulated when omitted.
        #[arg(long)]
        data: Option<PathBuf>,
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long, default_value_t = 5000)]
        good: usize,
        #[arg(long, default_value_t = 5000)]
        ugly: usize,
        #[arg(long, default_value_t = 5000)]
        noise: usize,
        /// Also write a JSON report.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classify a single frame of raw samples.
    Infer {
        genome: PathBuf,
        /// File of samples separated by commas or whitespace; `-` reads stdin.
        #[arg(long, conflicts_with = "samples")]
        frame: Option<PathBuf>,
        /// Samples inline, comma separated.
        #[arg(long, value_delimiter = ',')]
        samples: Option<Vec<i64>>,
        /// Print per-layer sums and activations.
        #[arg(long)]
        trace: bool,
    },
    /// Write the VHDL package and entity for a genome.
    Emit {
        genome: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Entity name; files are `<name>.vhd` and `<name>_pkg.vhd`.
        #[arg(long, default_value = "lutnet_bnn")]
        name: String,
    },
}

fn run(cli: Cli) -> anyhow::Result<()> {
    if let Some(n) = cli.workers {
        commands::set_workers(n)?;
    }
    match cli.command {
        Command::Simulate {
            cfg,
            good,
            ugly,
            noise,
            out,
        } => commands::simulate(cfg.config.as_deref(), cfg.seed, [good, ugly, noise], &out),
        Command::Train { cfg, out, resume } => match resume {
            Some(ckpt) => commands::resume(&ckpt, cfg.config.as_deref(), out.as_deref()),
            None => commands::train(cfg.config.as_deref(), cfg.seed, out.as_deref()),
        },
        Command::Resume {
            checkpoint,
            config,
            out,
        } => commands::resume(&checkpoint, config.as_deref(), out.as_deref()),
        Command::Evaluate {
            genome,
            data,
            cfg,
            good,
            ugly,
            noise,
            out,
        } => commands::evaluate(
            &genome,
            data.as_deref(),
            cfg.config.as_deref(),
            cfg.seed,
            [good, ugly, noise],
            out.as_deref(),
        ),
        Command::Infer {
            genome,
            frame,
            samples,
            trace,
        } => commands::infer(&genome, frame.as_deref(), samples, trace),
        Command::Emit { genome, out, name } => commands::emit(&genome, &out, &name),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("lutnet: error: {e:#}");
            match e.downcast_ref::<commands::Interrupted>() {
                Some(_) => ExitCode::from(130),
                None => ExitCode::FAILURE,
            }
        }
    }
}
