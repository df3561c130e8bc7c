use rand::Rng;

use super::{argmax, AgentError};
use crate::neural::{mlp_specs, Activation, AdamConfig, Direction, Gradients, Network};
use crate::replay::{ReplayMemory, Transition};

#[derive(Debug, Clone, PartialEq)]
pub struct DqnConfig {
    pub hidden: Vec<usize>,
    pub learning_rate: f64,
    /// Probability of taking the greedy action.
    pub exploit_probability: f64,
    pub gamma: f64,
    /// Learn calls between hard target syncs; 0 disables syncing.
    pub target_update_period: u64,
    pub batch_size: usize,
    pub memory_capacity: usize,
}

/// Deep Q-network with an evaluation net, a periodically synced target net
/// and its own replay memory.
#[derive(Debug, Clone)]
pub struct DqnAgent {
    eval: Network,
    target: Network,
    adam: AdamConfig,
    exploit_probability: f64,
    gamma: f64,
    target_update_period: u64,
    batch_size: usize,
    learn_calls: u64,
    memory: ReplayMemory<usize>,
}

impl DqnAgent {
    pub fn new(
        obs_width: usize,
        num_actions: usize,
        cfg: &DqnConfig,
        seed: u64,
    ) -> Result<Self, AgentError> {
        let specs = mlp_specs(obs_width, &cfg.hidden, num_actions, Activation::Identity);
        let eval = Network::init(&specs, seed)?;
        let target = eval.clone();
        Self::from_networks(eval, target, cfg)
    }

    pub fn from_networks(
        eval: Network,
        target: Network,
        cfg: &DqnConfig,
    ) -> Result<Self, AgentError> {
        if eval.specs() != target.specs() {
            return Err(AgentError::Config(
                "evaluation and target networks differ in shape".into(),
            ));
        }
        if !(0.0..=1.0).contains(&cfg.exploit_probability) || !(0.0..=1.0).contains(&cfg.gamma) {
            return Err(AgentError::Config(
                "epsilon and gamma must lie in [0, 1]".into(),
            ));
        }
        if cfg.batch_size == 0 || cfg.memory_capacity == 0 {
            return Err(AgentError::Config(
                "batch size and memory capacity must be positive".into(),
            ));
        }
        Ok(Self {
            eval,
            target,
            adam: AdamConfig::with_rate(cfg.learning_rate),
            exploit_probability: cfg.exploit_probability,
            gamma: cfg.gamma,
            target_update_period: cfg.target_update_period,
            batch_size: cfg.batch_size,
            learn_calls: 0,
            memory: ReplayMemory::new(cfg.memory_capacity),
        })
    }

    pub fn eval_network(&self) -> &Network {
        &self.eval
    }

    pub fn target_network(&self) -> &Network {
        &self.target
    }

    pub fn num_actions(&self) -> usize {
        self.eval.output_width()
    }

    pub fn memory(&self) -> &ReplayMemory<usize> {
        &self.memory
    }

    pub fn learn_calls(&self) -> u64 {
        self.learn_calls
    }

    pub fn q_values(&self, obs: &[f64]) -> Result<Vec<f64>, AgentError> {
        Ok(self.eval.predict(obs)?)
    }

    pub fn greedy_action(&self, obs: &[f64]) -> Result<usize, AgentError> {
        Ok(argmax(&self.q_values(obs)?))
    }

    /// Greedy with probability ε, uniform otherwise.
    pub fn select<R: Rng + ?Sized>(&self, obs: &[f64], rng: &mut R) -> Result<usize, AgentError> {
        if rng.random::<f64>() < self.exploit_probability {
            self.greedy_action(obs)
        } else {
            Ok(rng.random_range(0..self.num_actions()))
        }
    }

    pub fn remember(&mut self, t: Transition<usize>) {
        self.memory.push(t);
    }

    /// Samples a batch and learns once, as soon as the memory holds a full batch.
    pub fn train_step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<Option<f64>, AgentError> {
        if self.memory.len() < self.batch_size {
            return Ok(None);
        }
        let batch = self.memory.sample(self.batch_size, rng)?;
        self.learn(&batch).map(Some)
    }

    /// One Adam step on the mean squared TD error; returns the loss before the step.
    pub fn learn(&mut self, batch: &[Transition<usize>]) -> Result<f64, AgentError> {
        if batch.is_empty() {
            return Err(AgentError::EmptyBatch);
        }
        let scale = 1.0 / batch.len() as f64;
        let mut grads = Gradients::zeros_like(&self.eval);
        let mut loss = 0.0;
        for t in batch {
            let target = if t.terminal {
                t.reward
            } else {
                let next_q = self.target.predict(&t.next_state)?;
                t.reward + self.gamma * next_q.iter().copied().fold(f64::NEG_INFINITY, f64::max)
            };
            let (q, cache) = self.eval.forward(&t.state)?;
            if t.action >= q.len() {
                return Err(AgentError::Config(format!(
                    "action index {} out of range",
                    t.action
                )));
            }
            let err = q[t.action] - target;
            loss += scale * err * err;
            let mut out_grad = vec![0.0; q.len()];
            out_grad[t.action] = 2.0 * scale * err;
            let (g, _) = self.eval.backward(&cache, &out_grad)?;
            grads.add_scaled(&g, 1.0);
        }
        if !loss.is_finite() {
            return Err(AgentError::NonFinite {
                what: "DQN loss",
                value: loss,
            });
        }
        self.eval
            .adam_step(&grads, &self.adam, Direction::Descent)?;
        self.learn_calls += 1;
        if self.target_update_period > 0
            && self.learn_calls.is_multiple_of(self.target_update_period)
        {
            self.target.soft_update(&self.eval, 1.0)?;
        }
        Ok(loss)
    }
}
