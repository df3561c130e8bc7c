//! Trains a short DQN run into a directory, reloads the final checkpoint and
//! checks that it replays the same evaluation episode.

use irs_uav::harness::{
    evaluate, load_checkpoint, train, Algorithm, ExperimentConfig, CHECKPOINT_FILE,
};

fn main() {
    let dir = std::env::temp_dir().join("irs-uav-checkpoint-example");
    let mut cfg = ExperimentConfig::desk();
    cfg.algorithm = Algorithm::Dqn;
    cfg.episodes = 20;
    cfg.output_dir = Some(dir.clone());
    let out = train(&cfg).unwrap();

    let path = dir.join(CHECKPOINT_FILE);
    let ckpt = load_checkpoint(&path).unwrap();
    println!("{}: algo {:?}", path.display(), ckpt.meta("algo"));
    for (name, net) in &ckpt.networks {
        let widths: Vec<String> = net
            .specs()
            .iter()
            .map(|s| format!("{}→{}", s.input_width, s.output_width))
            .collect();
        println!("  {name}: {}", widths.join(", "));
    }

    cfg.output_dir = None;
    let again = evaluate(&cfg, Some(&ckpt)).unwrap();
    println!(
        "evaluation identical after reload: {}",
        again == out.evaluation
    );
}
