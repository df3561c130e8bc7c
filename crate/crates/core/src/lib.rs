//! Simulator and learning agents for an IRS-assisted UAV downlink.
//!
//! A single-antenna UAV flies over a rectangular area and serves one ground
//! user per time slot through several reflecting surfaces. Policies choose the
//! UAV's move each slot; the surfaces' phases are aligned to the served user.
//! The reward trades Jain fairness of the service history against data rate,
//! and an episode ends when the propulsion energy budget runs out.
//!
//! - [`channel`]: geometry, array-response channels, phase alignment, rates, fairness
//! - [`env`]: UAV motion, propulsion energy, reward and the step function
//! - [`neural`]: dense networks with backprop, Adam and a text checkpoint format
//! - [`replay`]: experience replay memory
//! - [`agents`]: DQN, DDPG, greedy and random policies
//! - [`harness`]: configs, seeded training and evaluation, metrics and curve export

// Negated float comparisons reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod agents;
pub mod channel;
pub mod env;
pub mod harness;
pub mod neural;
pub mod replay;
