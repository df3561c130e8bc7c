mod common;

use std::f64::consts::PI;

use common::*;
use irs_uav::channel::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn channels(
    geom: &ScenarioGeometry,
    params: &ChannelParams,
    uav: Point2,
    n: usize,
) -> (ComplexVector, ComplexVector) {
    let ui: Vec<_> = (0..geom.num_irs())
        .map(|k| channel_uav_irs(uav, k, geom, params))
        .collect();
    let ie: Vec<_> = (0..geom.num_irs())
        .map(|k| channel_irs_ue(k, n, geom, params))
        .collect();
    (stack_channels(&ui).unwrap(), stack_channels(&ie).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn rate_matches_elementwise_evaluation(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let geom = random_geometry(&mut rng);
        let params = random_params(&mut rng);
        let uav = random_uav(&mut rng, &geom);
        let theta = random_phases(&mut rng, geom.total_elements());
        for n in 0..geom.num_ues() {
            let (ui, ie) = channels(&geom, &params, uav, n);
            let rate = data_rate(&ui, &ie, &PhaseMatrix(theta.clone()), &params).unwrap();
            let oracle = brute_force_rate(&geom, &params, uav, n, &theta);
            prop_assert!(relative_error(rate, oracle) <= 1e-9, "{rate} vs {oracle}");
        }
    }

    #[test]
    fn alignment_beats_quantized_and_arbitrary_phases(seed in any::<u64>(), levels in 1usize..16) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let geom = random_geometry(&mut rng);
        let params = random_params(&mut rng);
        let uav = random_uav(&mut rng, &geom);
        let (ui, ie) = channels(&geom, &params, uav, 0);
        let aligned = align_phases(&ui, &ie).unwrap();
        let quantized = quantize_phases(&aligned, levels);
        let other = PhaseMatrix(random_phases(&mut rng, geom.total_elements()));
        let best = data_rate(&ui, &ie, &aligned, &params).unwrap();
        let q = data_rate(&ui, &ie, &quantized, &params).unwrap();
        let r = data_rate(&ui, &ie, &other, &params).unwrap();
        prop_assert!(best >= q * (1.0 - 1e-12));
        prop_assert!(best >= r * (1.0 - 1e-12));
        // every aligned term is real and positive, so the gain is the amplitude sum
        let g = composite_gain(&ui, &ie, &aligned);
        let amp: f64 = ui.iter().zip(ie.iter()).map(|(a, b)| a.norm() * b.norm()).sum();
        prop_assert!((g.re - amp).abs() <= 1e-9 * amp);
        prop_assert!(g.im.abs() <= 1e-9 * amp);
    }

    #[test]
    fn quantization_error_is_at_most_half_a_step(
        phases in prop::collection::vec(0.0..(2.0 * PI), 1..40),
        levels in 1usize..32,
    ) {
        let q = quantize_phases(&PhaseMatrix(phases.clone()), levels);
        let step = 2.0 * PI / levels as f64;
        for (a, b) in phases.iter().zip(q.iter()) {
            prop_assert!(circular_distance(*a, *b) <= step / 2.0 + 1e-12);
            let idx = b / step;
            prop_assert!((idx - idx.round()).abs() < 1e-9 && idx.round() < levels as f64);
        }
    }

    #[test]
    fn fairness_bounds_and_symmetries(counts in prop::collection::vec(1u64..1000, 1..12), scale in 1u64..50) {
        let n = counts.len() as f64;
        let f = jain_fairness(&counts);
        prop_assert!(f >= 1.0 / n - 1e-12 && f <= 1.0 + 1e-12);
        let mut rev = counts.clone();
        rev.reverse();
        prop_assert!((jain_fairness(&rev) - f).abs() < 1e-12);
        let scaled: Vec<u64> = counts.iter().map(|c| c * scale).collect();
        prop_assert!((jain_fairness(&scaled) - f).abs() < 1e-12);
    }

    #[test]
    fn stacking_round_trips(k in 1usize..6, m in 1usize..8, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let parts: Vec<ComplexVector> = (0..k)
            .map(|_| {
                random_phases(&mut rng, m)
                    .into_iter()
                    .map(|p| num_complex::Complex64::from_polar(1.0, p))
                    .collect::<Vec<_>>()
                    .into()
            })
            .collect();
        let stacked = stack_channels(&parts).unwrap();
        prop_assert_eq!(stacked.len(), k * m);
        prop_assert_eq!(unstack_channels(&stacked, k).unwrap(), parts);
    }

    #[test]
    fn wrapped_angles_stay_in_range(a in -1e4f64..1e4) {
        let w = wrap_angle(a);
        prop_assert!((0.0..2.0 * PI).contains(&w));
        prop_assert!(circular_distance(w, a) < 1e-9);
    }
}
