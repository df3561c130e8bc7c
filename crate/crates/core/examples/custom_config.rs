//! Builds an experiment from config text: a three-IRS variant of the full-scale preset
//! with a smaller budget, evaluated with the greedy baseline.

use irs_uav::harness::{evaluate, ExperimentConfig};

const CONFIG: &str = "
# three IRSs, short episodes
K = 3
e_max = 5000
algo = greedy
seed = 3
alpha_db = -30
noise_dbm = -70
";

fn main() {
    let cfg = ExperimentConfig::parse(CONFIG).unwrap();
    println!("IRSs: {:?}", cfg.geometry.irs);
    println!(
        "alpha = {:e}, sigma^2 = {:e} W",
        cfg.channel.ref_path_loss, cfg.channel.noise_power
    );
    let m = evaluate(&cfg, None).unwrap();
    let ep = &m.episodes[0];
    println!(
        "greedy: {} slots, reward {:.2}, fairness {:.3}",
        ep.slots, ep.accumulated_reward, ep.final_fairness
    );

    match ExperimentConfig::parse("K = 0") {
        Err(e) => println!("rejected: {e}"),
        Ok(_) => unreachable!(),
    }
}
