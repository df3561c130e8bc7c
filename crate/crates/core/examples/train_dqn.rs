//! Trains DQN on the desk-scale scenario and prints a smoothed learning curve.
//!
//! cargo run --release --example train_dqn [seed]

use irs_uav::harness::{moving_mean, train, Algorithm, ExperimentConfig};

fn main() {
    let seed = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(1);
    let mut cfg = ExperimentConfig::desk();
    cfg.algorithm = Algorithm::Dqn;
    cfg.seed = seed;

    let out = train(&cfg).expect("training failed");
    let rewards: Vec<f64> = out
        .training
        .episodes
        .iter()
        .map(|e| e.accumulated_reward)
        .collect();
    let smooth = moving_mean(&rewards, cfg.smoothing_window);
    for ep in (0..rewards.len()).step_by(25).chain([rewards.len() - 1]) {
        println!(
            "episode {ep:>4}: reward {:>7.2}, mean of last {} {:>7.2}",
            rewards[ep], cfg.smoothing_window, smooth[ep]
        );
    }
    let eval = &out.evaluation.episodes[0];
    println!(
        "greedy evaluation: reward {:.2} over {} slots, fairness {:.3}, {} boundary hits",
        eval.accumulated_reward, eval.slots, eval.final_fairness, eval.out_of_bounds
    );
}
