//! Rates seen by each UE of the full-scale scenario with aligned, quantized and
//! random IRS phases, for a UAV hovering above the middle of the area.

use irs_uav::channel::*;
use irs_uav::harness::ExperimentConfig;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let cfg = ExperimentConfig::table2();
    let geom = &cfg.geometry;
    let params = &cfg.channel;
    let uav = Point2::new(300.0, 100.0);
    let mut rng = ChaCha8Rng::seed_from_u64(1);

    let ui: Vec<_> = (0..geom.num_irs())
        .map(|k| channel_uav_irs(uav, k, geom, params))
        .collect();
    let h_ui = stack_channels(&ui).unwrap();

    println!(
        "UAV at ({}, {}), {} IRSs × {} elements",
        uav.x,
        uav.y,
        geom.num_irs(),
        geom.elements_per_irs
    );
    println!(
        "{:>3} {:>14} {:>14} {:>14}",
        "UE", "aligned", "quantized/12", "random"
    );
    let mut rates = Vec::new();
    for n in 0..geom.num_ues() {
        let ie: Vec<_> = (0..geom.num_irs())
            .map(|k| channel_irs_ue(k, n, geom, params))
            .collect();
        let h_ie = stack_channels(&ie).unwrap();
        let aligned = align_phases(&h_ui, &h_ie).unwrap();
        let quantized = quantize_phases(&aligned, cfg.phase_levels);
        let random = PhaseMatrix(
            (0..h_ui.len())
                .map(|_| rng.random_range(0.0..std::f64::consts::TAU))
                .collect(),
        );
        let r =
            [&aligned, &quantized, &random].map(|t| data_rate(&h_ui, &h_ie, t, params).unwrap());
        println!("{n:>3} {:>14.6e} {:>14.6e} {:>14.6e}", r[0], r[1], r[2]);
        rates.push(r[0]);
    }
    let served = best_ue(&rates);
    println!("served UE: {served}");

    let mut counts = vec![0u64; geom.num_ues()];
    counts[served] += 1;
    println!("fairness after one slot: {:.4}", jain_fairness(&counts));
    println!("fairness of (2, 1, 0): {:.4}", jain_fairness(&[2, 1, 0]));
}
