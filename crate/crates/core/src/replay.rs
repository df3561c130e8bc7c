//! Fixed-capacity experience replay with uniform sampling.

use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReplayError {
    #[error("cannot sample {requested} transitions from a memory holding {available}")]
    NotEnough { requested: usize, available: usize },
}

/// One `(s, a, r, s', terminal)` record. `A` is the action encoding: a table
/// index for DQN, the raw actor output for DDPG.
#[derive(Debug, Clone, PartialEq)]
pub struct Transition<A> {
    pub state: Vec<f64>,
    pub action: A,
    pub reward: f64,
    pub next_state: Vec<f64>,
    pub terminal: bool,
}

/// Ring buffer; once full, each push overwrites the oldest entry.
#[derive(Debug, Clone)]
pub struct ReplayMemory<A> {
    capacity: usize,
    items: Vec<Transition<A>>,
    cursor: usize,
}

impl<A: Clone> ReplayMemory<A> {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "replay capacity must be positive");
        Self {
            capacity,
            items: Vec::with_capacity(capacity.min(1 << 16)),
            cursor: 0,
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn push(&mut self, t: Transition<A>) {
        if self.items.len() < self.capacity {
            self.items.push(t);
        } else {
            self.items[self.cursor] = t;
        }
        self.cursor = (self.cursor + 1) % self.capacity;
    }

    /// `count` uniform draws with replacement.
    pub fn sample<R: Rng + ?Sized>(
        &self,
        count: usize,
        rng: &mut R,
    ) -> Result<Vec<Transition<A>>, ReplayError> {
        if self.items.len() < count || self.items.is_empty() {
            return Err(ReplayError::NotEnough {
                requested: count,
                available: self.items.len(),
            });
        }
        Ok((0..count)
            .map(|_| self.items[rng.random_range(0..self.items.len())].clone())
            .collect())
    }

    /// Stored transitions from oldest to newest.
    pub fn iter_oldest_first(&self) -> impl Iterator<Item = &Transition<A>> {
        let split = if self.items.len() < self.capacity {
            0
        } else {
            self.cursor
        };
        self.items[split..].iter().chain(self.items[..split].iter())
    }
}
