//! Runs a short random-policy experiment and writes the plotting tables.

use irs_uav::harness::{export_curves, train, Algorithm, ExperimentConfig};

fn main() {
    let dir = std::env::temp_dir().join("irs-uav-export-example");
    let mut cfg = ExperimentConfig::desk();
    cfg.algorithm = Algorithm::Random;
    cfg.episodes = 40;
    cfg.output_dir = Some(dir.clone());
    train(&cfg).unwrap();

    for path in export_curves(&dir, 10).unwrap() {
        let text = std::fs::read_to_string(&path).unwrap();
        println!("== {} ({} rows)", path.display(), text.lines().count() - 1);
        for line in text.lines().take(4) {
            println!("{line}");
        }
    }
}
