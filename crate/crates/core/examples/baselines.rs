//! Greedy and random policies on both presets.

use irs_uav::harness::{evaluate, Algorithm, ExperimentConfig};

fn main() {
    for (name, base) in [
        ("table2", ExperimentConfig::table2()),
        ("desk", ExperimentConfig::desk()),
    ] {
        for algo in [Algorithm::Greedy, Algorithm::Random] {
            let mut rewards = Vec::new();
            let mut slots = Vec::new();
            for seed in 1..=5 {
                let mut cfg = base.clone();
                cfg.algorithm = algo;
                cfg.seed = seed;
                let m = evaluate(&cfg, None).unwrap();
                rewards.push(m.episodes[0].accumulated_reward);
                slots.push(m.episodes[0].slots);
            }
            let mean = rewards.iter().sum::<f64>() / rewards.len() as f64;
            println!("{name:>6} {algo:>6}: mean reward {mean:>8.2}, slots {slots:?}");
        }
    }
}
