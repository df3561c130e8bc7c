use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use irs_uav::harness::{
    export_curves, load_checkpoint, train, Algorithm, ExperimentConfig, HarnessError,
    CHECKPOINT_FILE,
};

#[derive(Parser)]
#[command(
    name = "irs-uav",
    version,
    about = "Train and evaluate UAV trajectory policies for an IRS-assisted downlink"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train an agent and write metrics, checkpoints and a final evaluation.
    Train {
        #[arg(long, value_parser = parse_algo)]
        algo: Algorithm,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run one greedy episode of a checkpoint (or of the configured baseline).
    Eval {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write curve tables from a run directory.
    Export {
        #[arg(long)]
        run: PathBuf,
        #[arg(long, default_value_t = 100)]
        window: usize,
    },
}

fn parse_algo(s: &str) -> Result<Algorithm, String> {
    s.parse()
}

fn run(cli: Cli) -> Result<(), HarnessError> {
    match cli.command {
        Command::Train {
            algo,
            config,
            seed,
            out,
        } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            cfg.algorithm = algo;
            cfg.seed = seed;
            cfg.output_dir = Some(out.clone());
            let result = train(&cfg)?;
            let eval = &result.evaluation.episodes[0];
            println!(
                "{algo}: {} episodes, last reward {:.3}, evaluation reward {:.3} over {} slots",
                result.training.episodes.len(),
                result
                    .training
                    .episodes
                    .last()
                    .map_or(0.0, |e| e.accumulated_reward),
                eval.accumulated_reward,
                eval.slots
            );
            if algo.needs_checkpoint() {
                println!("checkpoint: {}", out.join(CHECKPOINT_FILE).display());
            }
        }
        Command::Eval {
            config,
            checkpoint,
            out,
        } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            cfg.output_dir = Some(out);
            let ckpt = checkpoint.as_deref().map(load_checkpoint).transpose()?;
            if let Some(algo) = ckpt.as_ref().and_then(|c| c.meta("algo")) {
                cfg.algorithm = algo.parse().map_err(HarnessError::CheckpointMismatch)?;
            }
            let metrics = irs_uav::harness::evaluate(&cfg, ckpt.as_ref())?;
            let ep = &metrics.episodes[0];
            println!(
                "{}: reward {:.3}, {} slots, fairness {:.3}, sum rate {:.3}",
                cfg.algorithm, ep.accumulated_reward, ep.slots, ep.final_fairness, ep.sum_rate
            );
        }
        Command::Export { run, window } => {
            for path in export_curves(&run, window)? {
                println!("{}", path.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
