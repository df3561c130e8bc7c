//! Trajectory policies: DQN over a discrete move table, DDPG over continuous
//! moves, and the greedy and random baselines.

mod baselines;
mod ddpg;
mod dqn;

use std::f64::consts::TAU;

use thiserror::Error;

use crate::env::{Action, EnvError};
use crate::neural::NeuralError;
use crate::replay::ReplayError;

pub use baselines::{greedy_select, random_select};
pub use ddpg::{
    actor_ascent, critic_value_and_action_gradient, map_raw_action, DdpgAgent, DdpgConfig,
};
pub use dqn::{DqnAgent, DqnConfig};

#[derive(Debug, Error, PartialEq)]
pub enum AgentError {
    #[error(transparent)]
    Neural(#[from] NeuralError),
    #[error(transparent)]
    Replay(#[from] ReplayError),
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error("empty training batch")]
    EmptyBatch,
    #[error("non-finite {what}: {value}")]
    NonFinite { what: &'static str, value: f64 },
    #[error("invalid agent configuration: {0}")]
    Config(String),
}

/// The finite move set: `N^μ` headings `2πi/N^μ` crossed with `N^d`
/// distances `d_max·l/N^d` (`l = 1..=N^d`). Index `i·N^d + (l−1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscreteActionTable {
    pub directions: usize,
    pub distances: usize,
    pub max_distance: f64,
}

impl DiscreteActionTable {
    pub fn new(directions: usize, distances: usize, max_distance: f64) -> Self {
        assert!(
            directions >= 1 && distances >= 1,
            "action table needs at least one entry"
        );
        Self {
            directions,
            distances,
            max_distance,
        }
    }

    pub fn len(&self) -> usize {
        self.directions * self.distances
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index_of(&self, direction: usize, distance_level: usize) -> usize {
        debug_assert!(distance_level >= 1 && distance_level <= self.distances);
        direction * self.distances + distance_level - 1
    }

    pub fn action(&self, index: usize) -> Action {
        assert!(index < self.len(), "action index {index} out of range");
        let i = index / self.distances;
        let l = index % self.distances + 1;
        Action::new(
            TAU * i as f64 / self.directions as f64,
            self.max_distance * l as f64 / self.distances as f64,
        )
    }

    pub fn actions(&self) -> impl Iterator<Item = Action> + '_ {
        (0..self.len()).map(|i| self.action(i))
    }
}

/// Index of the largest value; the first one wins ties.
pub(crate) fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}
