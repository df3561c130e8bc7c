//! Per-slot propulsion energy against flying speed, and what it implies for
//! episode length under the full-scale budget.

use irs_uav::env::{propulsion_energy, EnergyModel};

fn main() {
    let model = EnergyModel::TABLE_II;
    println!("{:>8} {:>12} {:>10}", "v (m/s)", "energy (J)", "slots");
    for v in [0.0, 5.0, 10.0, 13.33, 20.0, 26.67, 30.0, 40.0] {
        let e = propulsion_energy(v, &model);
        println!("{v:>8.2} {e:>12.2} {:>10.1}", model.max_energy / e);
    }
    let hover = propulsion_energy(0.0, &model);
    let best = model.min_slot_energy(40.0);
    println!(
        "hovering: {hover:.2} J/slot, {} slots",
        (model.max_energy / hover).ceil()
    );
    println!(
        "cheapest cruise: {best:.2} J/slot, {} slots",
        (model.max_energy / best).ceil()
    );
}
