use std::f64::consts::TAU;

use irs_uav::env::{propulsion_energy, Action, PhaseStrategy};
use irs_uav::harness::ExperimentConfig;
use proptest::prelude::*;

fn actions() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((0.0..TAU, 0.0..=40.0), 1..60)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn step_invariants_hold_along_any_trajectory(moves in actions(), quantized in any::<bool>()) {
        let cfg = ExperimentConfig::table2();
        let env = cfg.build_env().unwrap();
        let strategy = if quantized { PhaseStrategy::Quantized { levels: 12 } } else { PhaseStrategy::Continuous };
        let n = cfg.geometry.ues.len() as f64;
        let mut state = env.reset(cfg.start).unwrap();
        for (angle, distance) in moves {
            if state.is_done() {
                break;
            }
            let action = Action::new(angle, distance);
            let out = env.step(&state, action, strategy).unwrap();
            prop_assert_eq!(&out, &env.step(&state, action, strategy).unwrap());

            let g = env.geometry();
            prop_assert!(g.contains(out.next.x, out.next.y));
            let tx = state.x + distance * angle.cos();
            let ty = state.y + distance * angle.sin();
            prop_assert_eq!(out.out_of_bounds, !g.contains(tx, ty));
            if !out.out_of_bounds {
                prop_assert!((out.next.x - tx).abs() < 1e-12 && (out.next.y - ty).abs() < 1e-12);
            }

            let spent = state.energy - out.next.energy;
            prop_assert!((spent - propulsion_energy(distance, env.energy_model())).abs() < 1e-9);
            prop_assert!(spent > 0.0);
            prop_assert_eq!(out.next.ts, state.ts + 1);
            prop_assert_eq!(out.next.serve_counts.iter().sum::<u64>(), out.next.ts);
            prop_assert!(out.fairness >= 1.0 / n - 1e-12 && out.fairness <= 1.0 + 1e-12);
            prop_assert!(out.rates.iter().all(|&r| r >= 0.0 && r.is_finite()));
            prop_assert!(out.rates.iter().all(|&r| r <= out.served_rate()));

            let rc = env.reward_config();
            let expected = out.fairness + rc.rate_weight / rc.fairness_weight * out.served_rate()
                - if out.out_of_bounds { rc.penalty } else { 0.0 };
            prop_assert_eq!(out.reward, expected);
            prop_assert_eq!(out.done, out.next.energy <= 0.0);

            let obs = env.observe(&out.next);
            prop_assert!(obs.iter().all(|v| (0.0..=1.0).contains(v)));
            state = out.next;
        }
    }

    #[test]
    fn any_fixed_move_exhausts_the_budget(angle in 0.0..TAU, distance in 0.0..=40.0) {
        let mut cfg = ExperimentConfig::desk();
        cfg.energy.max_energy = 2000.0;
        let env = cfg.build_env().unwrap();
        let mut state = env.reset(cfg.start).unwrap();
        let action = Action::new(angle, distance);
        let mut slots = 0;
        while !state.is_done() {
            state = env.step(&state, action, PhaseStrategy::Continuous).unwrap().next;
            slots += 1;
        }
        let min = env.energy_model().min_slot_energy(40.0);
        prop_assert!(slots as f64 <= (2000.0 / min).ceil());
        prop_assert!(env.step(&state, action, PhaseStrategy::Continuous).is_err());
    }
}

#[test]
fn illegal_moves_are_rejected() {
    let cfg = ExperimentConfig::table2();
    let env = cfg.build_env().unwrap();
    let s = env.reset(cfg.start).unwrap();
    for a in [
        Action::new(TAU, 10.0),
        Action::new(-0.1, 10.0),
        Action::new(1.0, 40.5),
        Action::new(1.0, -1.0),
    ] {
        assert!(env.step(&s, a, PhaseStrategy::Continuous).is_err(), "{a:?}");
    }
}
