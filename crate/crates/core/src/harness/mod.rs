//! Experiment orchestration: configuration, seeded training and evaluation
//! loops, CSV metrics, checkpoint files and curve export.

mod config;
mod export;
mod metrics;
mod run;

use std::path::PathBuf;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::agents::AgentError;
use crate::env::EnvError;
use crate::neural::NeuralError;

pub use config::{db_to_linear, dbm_to_watts, Algorithm, ConfigError, ExperimentConfig, Preset};
pub use export::{export_curves, moving_mean, REWARD_CURVE_FILE, TS_CURVE_FILE};
pub use metrics::{
    read_episodes, read_steps, write_metrics, MetricsWriter, EPISODE_COLUMNS, METRICS_VERSION,
    STEP_COLUMNS,
};
pub use run::{
    evaluate, evaluate_policy, load_checkpoint, train, EpisodeSummary, Policy, RunMetrics,
    StepRecord, TrainOutcome, CHECKPOINT_FILE, EPISODES_FILE, EVAL_EPISODES_FILE, EVAL_STEPS_FILE,
    STEPS_FILE,
};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config: {0}")]
    Config(#[from] ConfigError),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error(transparent)]
    Agent(#[from] AgentError),
    #[error(transparent)]
    Neural(#[from] NeuralError),
    #[error("checkpoint does not match the configuration: {0}")]
    CheckpointMismatch(String),
    #[error("{}: line {line}: {message}", path.display())]
    Metrics {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("missing input: {0}")]
    MissingInput(String),
}

impl HarnessError {
    /// Process exit code: 1 for configuration problems, 2 for anything that
    /// aborts a run.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => 1,
            _ => 2,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.into(),
            source,
        }
    }
}

/// Independent random streams derived from one run seed, so that e.g. a
/// different batch size leaves exploration untouched.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RngStream {
    Init = 0,
    Explore = 1,
    Replay = 2,
    Env = 3,
}

pub fn stream_rng(seed: u64, stream: RngStream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}
