use rand::Rng;

use super::{AgentError, DiscreteActionTable};
use crate::env::{Env, EnvState, PhaseStrategy};

/// One-slot lookahead: the table entry with the highest immediate reward
/// (first index on ties).
pub fn greedy_select(
    env: &Env,
    state: &EnvState,
    table: &DiscreteActionTable,
    strategy: PhaseStrategy,
) -> Result<usize, AgentError> {
    let mut best = 0;
    let mut best_reward = f64::NEG_INFINITY;
    for (i, action) in table.actions().enumerate() {
        let reward = env.step(state, action, strategy)?.reward;
        if reward > best_reward {
            best = i;
            best_reward = reward;
        }
    }
    Ok(best)
}

pub fn random_select<R: Rng + ?Sized>(table: &DiscreteActionTable, rng: &mut R) -> usize {
    rng.random_range(0..table.len())
}
