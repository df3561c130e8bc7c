//! Trains DDPG on the desk-scale scenario and prints the evaluation trajectory.
//!
//! cargo run --release --example train_ddpg [seed]

use irs_uav::harness::{train, Algorithm, ExperimentConfig};

fn main() {
    let seed = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(1);
    let mut cfg = ExperimentConfig::desk();
    cfg.algorithm = Algorithm::Ddpg;
    cfg.seed = seed;

    let out = train(&cfg).expect("training failed");
    let n = out.training.episodes.len();
    let window = |r: std::ops::Range<usize>| {
        out.training.episodes[r.clone()]
            .iter()
            .map(|e| e.accumulated_reward)
            .sum::<f64>()
            / r.len() as f64
    };
    println!(
        "mean reward, first 50 episodes {:.2}, last 50 {:.2}",
        window(0..50),
        window(n - 50..n)
    );

    println!(
        "{:>3} {:>8} {:>8} {:>9} {:>3} {:>7}",
        "ts", "x", "y", "energy", "ue", "reward"
    );
    for s in &out.evaluation.steps {
        println!(
            "{:>3} {:>8.1} {:>8.1} {:>9.1} {:>3} {:>7.3}",
            s.ts, s.x, s.y, s.energy, s.served_ue, s.reward
        );
    }
    println!("total {:.2}", out.evaluation.episodes[0].accumulated_reward);
}
