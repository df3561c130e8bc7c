use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::AgentError;
use crate::channel::wrap_angle;
use crate::env::Action;
use crate::neural::{mlp_specs, Activation, AdamConfig, Direction, Gradients, Network};
use crate::replay::{ReplayMemory, Transition};

#[derive(Debug, Clone, PartialEq)]
pub struct DdpgConfig {
    pub actor_hidden: Vec<usize>,
    pub critic_hidden: Vec<usize>,
    pub actor_learning_rate: f64,
    pub critic_learning_rate: f64,
    pub gamma: f64,
    pub tau: f64,
    /// Initial standard deviation of the exploration noise.
    pub noise_scale: f64,
    /// Per-step multiplicative decay of the noise scale.
    pub noise_decay: f64,
    pub batch_size: usize,
    pub memory_capacity: usize,
    pub max_distance: f64,
}

/// Raw actor output `(x_μ, x_d) ∈ [−1, 1]²` to a move: `μ = x_μ·π mod 2π`,
/// `d = |x_d|·d_max`.
pub fn map_raw_action(raw: [f64; 2], max_distance: f64) -> Action {
    let distance = (raw[1].abs() * max_distance).min(max_distance);
    Action::new(wrap_angle(raw[0] * PI), distance)
}

/// Critic value at `(state, action)` and its gradient with respect to the action.
pub fn critic_value_and_action_gradient(
    critic: &Network,
    state: &[f64],
    action: &[f64],
) -> Result<(f64, Vec<f64>), AgentError> {
    let input: Vec<f64> = state.iter().chain(action).copied().collect();
    let (q, cache) = critic.forward(&input)?;
    let (_, grad_in) = critic.backward(&cache, &[1.0])?;
    Ok((q[0], grad_in[state.len()..].to_vec()))
}

/// One deterministic-policy-gradient ascent step of `actor` on
/// `mean_k Q(s_k, π(s_k))`, with `critic` supplying `Q` and `∇_a Q`.
/// Returns the objective before the step.
pub fn actor_ascent<F>(
    actor: &mut Network,
    adam: &AdamConfig,
    states: &[&[f64]],
    mut critic: F,
) -> Result<f64, AgentError>
where
    F: FnMut(&[f64], &[f64]) -> Result<(f64, Vec<f64>), AgentError>,
{
    if states.is_empty() {
        return Err(AgentError::EmptyBatch);
    }
    let scale = 1.0 / states.len() as f64;
    let mut grads = Gradients::zeros_like(actor);
    let mut objective = 0.0;
    for s in states {
        let (a, cache) = actor.forward(s)?;
        let (q, dq_da) = critic(s, &a)?;
        objective += scale * q;
        let out_grad: Vec<f64> = dq_da.iter().map(|g| g * scale).collect();
        let (g, _) = actor.backward(&cache, &out_grad)?;
        grads.add_scaled(&g, 1.0);
    }
    if !objective.is_finite() {
        return Err(AgentError::NonFinite {
            what: "actor objective",
            value: objective,
        });
    }
    actor.adam_step(&grads, adam, Direction::Ascent)?;
    Ok(objective)
}

/// Deterministic actor-critic with soft-updated targets and decaying
/// Gaussian exploration noise.
#[derive(Debug, Clone)]
pub struct DdpgAgent {
    actor: Network,
    critic: Network,
    target_actor: Network,
    target_critic: Network,
    actor_adam: AdamConfig,
    critic_adam: AdamConfig,
    gamma: f64,
    tau: f64,
    noise_scale: f64,
    noise_decay: f64,
    explore_steps: u64,
    batch_size: usize,
    max_distance: f64,
    memory: ReplayMemory<[f64; 2]>,
}

impl DdpgAgent {
    pub fn new(obs_width: usize, cfg: &DdpgConfig, seed: u64) -> Result<Self, AgentError> {
        let actor = Network::init(
            &mlp_specs(obs_width, &cfg.actor_hidden, 2, Activation::Tanh),
            seed,
        )?;
        let critic = Network::init(
            &mlp_specs(obs_width + 2, &cfg.critic_hidden, 1, Activation::Identity),
            seed.wrapping_add(1),
        )?;
        Self::from_networks(actor, critic, cfg)
    }

    /// Targets start as copies of the given networks.
    pub fn from_networks(
        actor: Network,
        critic: Network,
        cfg: &DdpgConfig,
    ) -> Result<Self, AgentError> {
        if actor.output_width() != 2 {
            return Err(AgentError::Config("actor must output 2 values".into()));
        }
        if critic.input_width() != actor.input_width() + 2 || critic.output_width() != 1 {
            return Err(AgentError::Config(
                "critic must map (state, action) to one value".into(),
            ));
        }
        if !(cfg.tau > 0.0 && cfg.tau <= 1.0) {
            return Err(AgentError::Config(format!(
                "tau {} outside (0, 1]",
                cfg.tau
            )));
        }
        if !(cfg.noise_decay > 0.0 && cfg.noise_decay <= 1.0) {
            return Err(AgentError::Config(format!(
                "noise decay {} outside (0, 1]",
                cfg.noise_decay
            )));
        }
        if !(0.0..=1.0).contains(&cfg.gamma) || !(cfg.noise_scale >= 0.0) {
            return Err(AgentError::Config(
                "gamma must lie in [0, 1] and noise scale be non-negative".into(),
            ));
        }
        if cfg.batch_size == 0 || cfg.memory_capacity == 0 {
            return Err(AgentError::Config(
                "batch size and memory capacity must be positive".into(),
            ));
        }
        Ok(Self {
            target_actor: actor.clone(),
            target_critic: critic.clone(),
            actor,
            critic,
            actor_adam: AdamConfig::with_rate(cfg.actor_learning_rate),
            critic_adam: AdamConfig::with_rate(cfg.critic_learning_rate),
            gamma: cfg.gamma,
            tau: cfg.tau,
            noise_scale: cfg.noise_scale,
            noise_decay: cfg.noise_decay,
            explore_steps: 0,
            batch_size: cfg.batch_size,
            max_distance: cfg.max_distance,
            memory: ReplayMemory::new(cfg.memory_capacity),
        })
    }

    pub fn actor(&self) -> &Network {
        &self.actor
    }

    pub fn critic(&self) -> &Network {
        &self.critic
    }

    pub fn target_actor(&self) -> &Network {
        &self.target_actor
    }

    pub fn target_critic(&self) -> &Network {
        &self.target_critic
    }

    pub fn memory(&self) -> &ReplayMemory<[f64; 2]> {
        &self.memory
    }

    /// Current noise standard deviation, `N'·η^steps`.
    pub fn current_noise_scale(&self) -> f64 {
        self.noise_scale * self.noise_decay.powf(self.explore_steps as f64)
    }

    pub fn explore_steps(&self) -> u64 {
        self.explore_steps
    }

    pub fn raw_action(&self, obs: &[f64]) -> Result<[f64; 2], AgentError> {
        let out = self.actor.predict(obs)?;
        Ok([out[0], out[1]])
    }

    /// Picks a move. With `explore`, Gaussian noise is added to the raw actor
    /// output and clipped to `[−1, 1]`, and the noise decays by one step.
    /// Returns the raw vector (what replay stores) and the mapped action.
    pub fn select<R: Rng + ?Sized>(
        &mut self,
        obs: &[f64],
        rng: &mut R,
        explore: bool,
    ) -> Result<([f64; 2], Action), AgentError> {
        let mut raw = self.raw_action(obs)?;
        if explore {
            let sd = self.current_noise_scale();
            if sd > 0.0 {
                let normal = Normal::new(0.0, sd).map_err(|_| AgentError::NonFinite {
                    what: "noise scale",
                    value: sd,
                })?;
                for x in &mut raw {
                    *x = (*x + normal.sample(rng)).clamp(-1.0, 1.0);
                }
            }
            self.explore_steps += 1;
        }
        Ok((raw, map_raw_action(raw, self.max_distance)))
    }

    pub fn remember(&mut self, t: Transition<[f64; 2]>) {
        self.memory.push(t);
    }

    pub fn train_step<R: Rng + ?Sized>(
        &mut self,
        rng: &mut R,
    ) -> Result<Option<(f64, f64)>, AgentError> {
        if self.memory.len() < self.batch_size {
            return Ok(None);
        }
        let batch = self.memory.sample(self.batch_size, rng)?;
        self.learn(&batch).map(Some)
    }

    /// Critic descent on the TD error of the stored actions, actor ascent on
    /// the critic's value of its own actions, then soft target updates.
    /// Returns `(critic loss, actor objective)`, both measured before their step.
    pub fn learn(&mut self, batch: &[Transition<[f64; 2]>]) -> Result<(f64, f64), AgentError> {
        let critic_loss = self.critic_step(batch)?;
        let states: Vec<&[f64]> = batch.iter().map(|t| t.state.as_slice()).collect();
        let critic = &self.critic;
        let objective = actor_ascent(&mut self.actor, &self.actor_adam, &states, |s, a| {
            critic_value_and_action_gradient(critic, s, a)
        })?;
        self.target_critic.soft_update(&self.critic, self.tau)?;
        self.target_actor.soft_update(&self.actor, self.tau)?;
        Ok((critic_loss, objective))
    }

    fn critic_step(&mut self, batch: &[Transition<[f64; 2]>]) -> Result<f64, AgentError> {
        if batch.is_empty() {
            return Err(AgentError::EmptyBatch);
        }
        let scale = 1.0 / batch.len() as f64;
        let mut grads = Gradients::zeros_like(&self.critic);
        let mut loss = 0.0;
        let mut input = Vec::with_capacity(self.critic.input_width());
        for t in batch {
            let target = if t.terminal {
                t.reward
            } else {
                let next_a = self.target_actor.predict(&t.next_state)?;
                input.clear();
                input.extend_from_slice(&t.next_state);
                input.extend_from_slice(&next_a);
                t.reward + self.gamma * self.target_critic.predict(&input)?[0]
            };
            input.clear();
            input.extend_from_slice(&t.state);
            input.extend_from_slice(&t.action);
            let (q, cache) = self.critic.forward(&input)?;
            let err = q[0] - target;
            loss += scale * err * err;
            let (g, _) = self.critic.backward(&cache, &[2.0 * scale * err])?;
            grads.add_scaled(&g, 1.0);
        }
        if !loss.is_finite() {
            return Err(AgentError::NonFinite {
                what: "critic loss",
                value: loss,
            });
        }
        self.critic
            .adam_step(&grads, &self.critic_adam, Direction::Descent)?;
        Ok(loss)
    }
}
