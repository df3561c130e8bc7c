use std::fs;
use std::path::Path;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::config::{Algorithm, ExperimentConfig};
use super::metrics::{write_metrics, MetricsWriter};
use super::{stream_rng, HarnessError, RngStream};
use crate::agents::{greedy_select, random_select, DdpgAgent, DiscreteActionTable, DqnAgent};
use crate::env::{Env, PhaseStrategy};
use crate::neural::{mlp_specs, Activation, Checkpoint, LayerSpec, Network};
use crate::replay::Transition;

pub const EPISODES_FILE: &str = "episodes.csv";
pub const STEPS_FILE: &str = "steps.csv";
pub const EVAL_EPISODES_FILE: &str = "eval_episodes.csv";
pub const EVAL_STEPS_FILE: &str = "eval_steps.csv";
pub const CHECKPOINT_FILE: &str = "checkpoint.txt";

const OBS_WIDTH: usize = 3;

/// One logged time slot, recorded after the move.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub episode: usize,
    pub ts: u64,
    pub x: f64,
    pub y: f64,
    pub energy: f64,
    pub served_ue: usize,
    pub rate: f64,
    pub fairness: f64,
    pub reward: f64,
    pub out_of_bounds: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeSummary {
    pub episode: usize,
    pub slots: u64,
    /// Sum of the episode's step rewards, in slot order.
    pub accumulated_reward: f64,
    pub final_fairness: f64,
    pub sum_rate: f64,
    pub out_of_bounds: u64,
    /// Mean training loss (critic loss for DDPG); `None` when nothing was learned.
    pub mean_loss: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunMetrics {
    pub episodes: Vec<EpisodeSummary>,
    pub steps: Vec<StepRecord>,
}

impl RunMetrics {
    pub fn mean_reward(&self) -> f64 {
        if self.episodes.is_empty() {
            return 0.0;
        }
        self.episodes
            .iter()
            .map(|e| e.accumulated_reward)
            .sum::<f64>()
            / self.episodes.len() as f64
    }

    pub fn episode_steps(&self, episode: usize) -> impl Iterator<Item = &StepRecord> {
        self.steps.iter().filter(move |s| s.episode == episode)
    }
}

#[derive(Debug, Clone)]
pub enum Policy {
    Dqn(DqnAgent),
    Ddpg(DdpgAgent),
    Greedy,
    Random,
}

impl Policy {
    /// Fresh agent for the configured algorithm, initialized from the run's
    /// init stream.
    pub fn new(cfg: &ExperimentConfig) -> Result<Self, HarnessError> {
        let seed: u64 = stream_rng(cfg.seed, RngStream::Init).random();
        Ok(match cfg.algorithm {
            Algorithm::Dqn => Policy::Dqn(DqnAgent::new(
                OBS_WIDTH,
                cfg.action_table().len(),
                &cfg.dqn_config(),
                seed,
            )?),
            Algorithm::Ddpg => Policy::Ddpg(DdpgAgent::new(OBS_WIDTH, &cfg.ddpg_config(), seed)?),
            Algorithm::Greedy => Policy::Greedy,
            Algorithm::Random => Policy::Random,
        })
    }

    pub fn algorithm(&self) -> Algorithm {
        match self {
            Policy::Dqn(_) => Algorithm::Dqn,
            Policy::Ddpg(_) => Algorithm::Ddpg,
            Policy::Greedy => Algorithm::Greedy,
            Policy::Random => Algorithm::Random,
        }
    }

    /// Learned parameters, or `None` for the stateless baselines.
    pub fn to_checkpoint(&self, episodes_done: usize) -> Option<Checkpoint> {
        let networks: Vec<(String, Network)> = match self {
            Policy::Dqn(a) => vec![
                ("eval".into(), a.eval_network().clone()),
                ("target".into(), a.target_network().clone()),
            ],
            Policy::Ddpg(a) => vec![
                ("actor".into(), a.actor().clone()),
                ("critic".into(), a.critic().clone()),
                ("target_actor".into(), a.target_actor().clone()),
                ("target_critic".into(), a.target_critic().clone()),
            ],
            Policy::Greedy | Policy::Random => return None,
        };
        Some(Checkpoint {
            meta: vec![
                ("algo".into(), self.algorithm().name().into()),
                ("episodes".into(), episodes_done.to_string()),
            ],
            networks,
        })
    }

    /// Rebuilds a learned policy, checking every network against the shapes
    /// the configuration implies.
    pub fn from_checkpoint(
        cfg: &ExperimentConfig,
        ckpt: &Checkpoint,
    ) -> Result<Self, HarnessError> {
        let algo: Algorithm = ckpt
            .meta("algo")
            .ok_or_else(|| HarnessError::CheckpointMismatch("no 'algo' entry".into()))?
            .parse()
            .map_err(HarnessError::CheckpointMismatch)?;
        let fetch = |name: &str, expected: Vec<LayerSpec>| -> Result<Network, HarnessError> {
            let net = ckpt.network(name).ok_or_else(|| {
                HarnessError::CheckpointMismatch(format!("missing network '{name}'"))
            })?;
            if net.specs() != expected {
                return Err(HarnessError::CheckpointMismatch(format!(
                    "network '{name}' has layers {:?}, configuration implies {:?}",
                    describe(&net.specs()),
                    describe(&expected)
                )));
            }
            Ok(net.clone())
        };
        match algo {
            Algorithm::Dqn => {
                let specs = mlp_specs(
                    OBS_WIDTH,
                    &cfg.dqn_hidden,
                    cfg.action_table().len(),
                    Activation::Identity,
                );
                let eval = fetch("eval", specs.clone())?;
                let target = fetch("target", specs)?;
                Ok(Policy::Dqn(DqnAgent::from_networks(
                    eval,
                    target,
                    &cfg.dqn_config(),
                )?))
            }
            Algorithm::Ddpg => {
                let actor = fetch(
                    "actor",
                    mlp_specs(OBS_WIDTH, &cfg.actor_hidden, 2, Activation::Tanh),
                )?;
                let critic = fetch(
                    "critic",
                    mlp_specs(OBS_WIDTH + 2, &cfg.critic_hidden, 1, Activation::Identity),
                )?;
                Ok(Policy::Ddpg(DdpgAgent::from_networks(
                    actor,
                    critic,
                    &cfg.ddpg_config(),
                )?))
            }
            other => Err(HarnessError::CheckpointMismatch(format!(
                "'{other}' has no learned parameters"
            ))),
        }
    }
}

fn describe(specs: &[LayerSpec]) -> Vec<String> {
    specs
        .iter()
        .map(|s| {
            format!(
                "{}x{} {}",
                s.input_width,
                s.output_width,
                s.activation.name()
            )
        })
        .collect()
}

pub fn load_checkpoint(path: &Path) -> Result<Checkpoint, HarnessError> {
    let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    Ok(Checkpoint::parse(&text)?)
}

fn save_checkpoint(path: &Path, ckpt: &Checkpoint) -> Result<(), HarnessError> {
    fs::write(path, ckpt.to_text()).map_err(|e| HarnessError::io(path, e))
}

struct Rollout<'a> {
    env: &'a Env,
    cfg: &'a ExperimentConfig,
    table: DiscreteActionTable,
    strategy: PhaseStrategy,
}

impl Rollout<'_> {
    fn new<'a>(env: &'a Env, cfg: &'a ExperimentConfig, algo: Algorithm) -> Rollout<'a> {
        let strategy = if algo.is_continuous() {
            PhaseStrategy::Continuous
        } else {
            PhaseStrategy::Quantized {
                levels: cfg.phase_levels,
            }
        };
        Rollout {
            env,
            cfg,
            table: cfg.action_table(),
            strategy,
        }
    }

    /// Plays one episode to energy exhaustion, appending its slots to `steps`.
    fn episode(
        &self,
        episode: usize,
        policy: &mut Policy,
        explore: &mut ChaCha8Rng,
        replay: &mut ChaCha8Rng,
        learn: bool,
        steps: &mut Vec<StepRecord>,
    ) -> Result<EpisodeSummary, HarnessError> {
        let mut state = self.env.reset(self.cfg.start)?;
        let mut summary = EpisodeSummary {
            episode,
            slots: 0,
            accumulated_reward: 0.0,
            final_fairness: 0.0,
            sum_rate: 0.0,
            out_of_bounds: 0,
            mean_loss: None,
        };
        let (mut loss_sum, mut loss_count) = (0.0, 0u64);
        while !state.is_done() {
            let obs = self.env.observe(&state);
            let (action, stored) = match &mut *policy {
                Policy::Dqn(agent) => {
                    let idx = if learn {
                        agent.select(&obs, explore)?
                    } else {
                        agent.greedy_action(&obs)?
                    };
                    (self.table.action(idx), StoredAction::Index(idx))
                }
                Policy::Ddpg(agent) => {
                    let (raw, action) = agent.select(&obs, explore, learn)?;
                    (action, StoredAction::Raw(raw))
                }
                Policy::Greedy => {
                    let idx = greedy_select(self.env, &state, &self.table, self.strategy)?;
                    (self.table.action(idx), StoredAction::None)
                }
                Policy::Random => (
                    self.table.action(random_select(&self.table, explore)),
                    StoredAction::None,
                ),
            };
            let out = self.env.step(&state, action, self.strategy)?;
            let next_obs = self.env.observe(&out.next);

            if learn {
                let loss = match (&mut *policy, stored) {
                    (Policy::Dqn(agent), StoredAction::Index(a)) => {
                        agent.remember(transition(&obs, a, out.reward, &next_obs, out.done));
                        agent.train_step(replay)?
                    }
                    (Policy::Ddpg(agent), StoredAction::Raw(a)) => {
                        agent.remember(transition(&obs, a, out.reward, &next_obs, out.done));
                        agent.train_step(replay)?.map(|(critic, _)| critic)
                    }
                    _ => None,
                };
                if let Some(l) = loss {
                    loss_sum += l;
                    loss_count += 1;
                }
            }

            summary.slots += 1;
            summary.accumulated_reward += out.reward;
            summary.sum_rate += out.served_rate();
            summary.out_of_bounds += u64::from(out.out_of_bounds);
            summary.final_fairness = out.fairness;
            steps.push(StepRecord {
                episode,
                ts: out.next.ts,
                x: out.next.x,
                y: out.next.y,
                energy: out.next.energy,
                served_ue: out.served,
                rate: out.served_rate(),
                fairness: out.fairness,
                reward: out.reward,
                out_of_bounds: out.out_of_bounds,
            });
            state = out.next;
        }
        if loss_count > 0 {
            summary.mean_loss = Some(loss_sum / loss_count as f64);
        }
        Ok(summary)
    }
}

enum StoredAction {
    Index(usize),
    Raw([f64; 2]),
    None,
}

fn transition<A>(
    obs: &[f64; 3],
    action: A,
    reward: f64,
    next: &[f64; 3],
    terminal: bool,
) -> Transition<A> {
    Transition {
        state: obs.to_vec(),
        action,
        reward,
        next_state: next.to_vec(),
        terminal,
    }
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub training: RunMetrics,
    /// The post-training greedy episode.
    pub evaluation: RunMetrics,
    pub policy: Policy,
}

/// Runs `episodes` training episodes, then one evaluation episode with
/// exploration off. With `output_dir` set, CSVs are written as the run
/// progresses and checkpoints every `checkpoint_interval` episodes and at the end.
pub fn train(cfg: &ExperimentConfig) -> Result<TrainOutcome, HarnessError> {
    cfg.validate()?;
    let env = cfg.build_env()?;
    let rollout = Rollout::new(&env, cfg, cfg.algorithm);
    let mut policy = Policy::new(cfg)?;
    let mut explore = stream_rng(cfg.seed, RngStream::Explore);
    let mut replay = stream_rng(cfg.seed, RngStream::Replay);

    let dir = cfg.output_dir.as_deref();
    if let Some(d) = dir {
        fs::create_dir_all(d).map_err(|e| HarnessError::io(d, e))?;
    }
    let mut writer = match dir {
        Some(d) => Some(MetricsWriter::create(
            &d.join(EPISODES_FILE),
            &d.join(STEPS_FILE),
        )?),
        None => None,
    };

    let mut training = RunMetrics::default();
    for ep in 0..cfg.episodes {
        let first = training.steps.len();
        let summary = rollout.episode(
            ep,
            &mut policy,
            &mut explore,
            &mut replay,
            true,
            &mut training.steps,
        )?;
        if let Some(w) = writer.as_mut() {
            w.write_episode(&summary, &training.steps[first..])?;
        }
        training.episodes.push(summary);
        if let (Some(d), true) = (
            dir,
            cfg.checkpoint_interval > 0 && (ep + 1) % cfg.checkpoint_interval == 0,
        ) {
            if let Some(ckpt) = policy.to_checkpoint(ep + 1) {
                save_checkpoint(&d.join(format!("checkpoint_ep{:06}.txt", ep + 1)), &ckpt)?;
            }
        }
    }

    let evaluation = evaluate_policy(cfg, &mut policy)?;
    if let Some(d) = dir {
        if let Some(ckpt) = policy.to_checkpoint(cfg.episodes) {
            save_checkpoint(&d.join(CHECKPOINT_FILE), &ckpt)?;
        }
        write_metrics(
            &evaluation,
            &d.join(EVAL_EPISODES_FILE),
            &d.join(EVAL_STEPS_FILE),
        )?;
    }
    Ok(TrainOutcome {
        training,
        evaluation,
        policy,
    })
}

/// One episode without exploration or learning. The random baseline draws
/// from the run's exploration stream, so repeated calls agree.
pub fn evaluate_policy(
    cfg: &ExperimentConfig,
    policy: &mut Policy,
) -> Result<RunMetrics, HarnessError> {
    let env = cfg.build_env()?;
    let rollout = Rollout::new(&env, cfg, policy.algorithm());
    let mut explore = stream_rng(cfg.seed, RngStream::Explore);
    let mut replay = stream_rng(cfg.seed, RngStream::Replay);
    let mut metrics = RunMetrics::default();
    let summary = rollout.episode(
        0,
        policy,
        &mut explore,
        &mut replay,
        false,
        &mut metrics.steps,
    )?;
    metrics.episodes.push(summary);
    Ok(metrics)
}

/// Evaluates a checkpoint (or the configured baseline when `checkpoint` is
/// `None`) and writes `eval_*.csv` to `cfg.output_dir` if set.
pub fn evaluate(
    cfg: &ExperimentConfig,
    checkpoint: Option<&Checkpoint>,
) -> Result<RunMetrics, HarnessError> {
    cfg.validate()?;
    let mut policy = match checkpoint {
        Some(ckpt) => Policy::from_checkpoint(cfg, ckpt)?,
        None if cfg.algorithm.needs_checkpoint() => {
            return Err(HarnessError::MissingInput(format!(
                "evaluating '{}' needs a checkpoint",
                cfg.algorithm
            )))
        }
        None => Policy::new(cfg)?,
    };
    let metrics = evaluate_policy(cfg, &mut policy)?;
    if let Some(d) = cfg.output_dir.as_deref() {
        fs::create_dir_all(d).map_err(|e| HarnessError::io(d, e))?;
        write_metrics(
            &metrics,
            &d.join(EVAL_EPISODES_FILE),
            &d.join(EVAL_STEPS_FILE),
        )?;
    }
    Ok(metrics)
}
