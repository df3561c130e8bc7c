#![allow(dead_code)]

use std::f64::consts::{PI, TAU};

use irs_uav::channel::{ChannelParams, IrsSite, Point2, ScenarioGeometry};
use rand::Rng;

pub fn table_params() -> ChannelParams {
    ChannelParams {
        ref_path_loss: 1e-3,
        ue_path_exponent: 2.8,
        element_spacing_ratio: 0.5,
        noise_power: 1e-10,
        tx_power: 0.01,
    }
}

/// Random scenario: 1–4 IRSs, 1–5 UEs, 1–10 elements, area up to 600 × 300 m.
pub fn random_geometry<R: Rng>(rng: &mut R) -> ScenarioGeometry {
    let area_x = rng.random_range(50.0..600.0);
    let area_y = rng.random_range(50.0..300.0);
    let irs = (0..rng.random_range(1..=4))
        .map(|_| {
            IrsSite::new(
                rng.random_range(0.0..=area_x),
                rng.random_range(0.0..=area_y),
                rng.random_range(5.0..150.0),
            )
        })
        .collect();
    let ues = (0..rng.random_range(1..=5))
        .map(|_| {
            Point2::new(
                rng.random_range(0.0..=area_x),
                rng.random_range(0.0..=area_y),
            )
        })
        .collect();
    ScenarioGeometry {
        uav_altitude: rng.random_range(160.0..250.0),
        area_x,
        area_y,
        irs,
        ues,
        elements_per_irs: rng.random_range(1..=10),
    }
}

pub fn random_params<R: Rng>(rng: &mut R) -> ChannelParams {
    ChannelParams {
        ref_path_loss: 10f64.powf(rng.random_range(-4.0..-2.0)),
        ue_path_exponent: rng.random_range(2.0..4.0),
        element_spacing_ratio: rng.random_range(0.1..=1.0),
        noise_power: 10f64.powf(rng.random_range(-13.0..-9.0)),
        tx_power: rng.random_range(0.001..1.0),
    }
}

pub fn random_uav<R: Rng>(rng: &mut R, geom: &ScenarioGeometry) -> Point2 {
    Point2::new(
        rng.random_range(0.0..=geom.area_x),
        rng.random_range(0.0..=geom.area_y),
    )
}

pub fn random_phases<R: Rng>(rng: &mut R, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.random_range(0.0..TAU)).collect()
}

/// Rate of UE `n` written out element by element with real arithmetic,
/// straight from the geometry. `theta` is IRS-major.
pub fn brute_force_rate(
    geom: &ScenarioGeometry,
    params: &ChannelParams,
    uav: Point2,
    n: usize,
    theta: &[f64],
) -> f64 {
    let ue = geom.ues[n];
    let (mut re, mut im) = (0.0, 0.0);
    for (k, s) in geom.irs.iter().enumerate() {
        let dz = geom.uav_altitude - s.height;
        let d1 = ((uav.x - s.x) * (uav.x - s.x) + (uav.y - s.y) * (uav.y - s.y) + dz * dz).sqrt();
        let d2 = ((s.x - ue.x) * (s.x - ue.x) + (s.y - ue.y) * (s.y - ue.y) + s.height * s.height)
            .sqrt();
        let a1 = (params.ref_path_loss / (d1 * d1)).sqrt();
        let a2 = (params.ref_path_loss / d2.powf(params.ue_path_exponent)).sqrt();
        let c1 = (s.x - uav.x) / d1;
        let c2 = (s.x - ue.x) / d2;
        for m in 0..geom.elements_per_irs {
            let p1 = -2.0 * PI * params.element_spacing_ratio * m as f64 * c1;
            let p2 = -2.0 * PI * params.element_spacing_ratio * m as f64 * c2;
            let phase = p1 + p2 - theta[k * geom.elements_per_irs + m];
            re += a1 * a2 * phase.cos();
            im += a1 * a2 * phase.sin();
        }
    }
    let snr = params.tx_power * (re * re + im * im) / params.noise_power;
    snr.ln_1p() * std::f64::consts::LOG2_E
}

pub fn relative_error(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

use irs_uav::neural::{Activation, LayerSpec, Network};

/// Small random architecture; every activation appears across draws.
pub fn random_specs<R: Rng>(rng: &mut R) -> Vec<LayerSpec> {
    const ACTS: [Activation; 3] = [Activation::Relu, Activation::Tanh, Activation::Identity];
    let depth = rng.random_range(1..=3);
    let mut width = rng.random_range(1..=5);
    (0..depth)
        .map(|_| {
            let out = rng.random_range(1..=6);
            let spec = LayerSpec::new(width, out, ACTS[rng.random_range(0..3)]);
            width = out;
            spec
        })
        .collect()
}

/// Smallest |pre-activation| over the ReLU units, so callers can avoid
/// inputs sitting on a kink.
pub fn min_relu_margin(net: &Network, input: &[f64]) -> f64 {
    let mut x = input.to_vec();
    let mut margin = f64::INFINITY;
    for l in net.layers() {
        let n_in = l.spec.input_width;
        let z: Vec<f64> = l
            .weights
            .chunks(n_in)
            .zip(&l.bias)
            .map(|(row, b)| row.iter().zip(&x).map(|(w, v)| w * v).sum::<f64>() + b)
            .collect();
        x = z
            .iter()
            .map(|&v| match l.spec.activation {
                Activation::Relu => {
                    margin = margin.min(v.abs());
                    v.max(0.0)
                }
                Activation::Tanh => v.tanh(),
                Activation::Identity => v,
            })
            .collect();
    }
    margin
}

pub fn weighted_output(net: &Network, input: &[f64], weights: &[f64]) -> f64 {
    net.predict(input)
        .unwrap()
        .iter()
        .zip(weights)
        .map(|(y, c)| y * c)
        .sum()
}

/// Worst relative error between backprop and central differences of
/// `Σ c_i y_i`, over every parameter and every input coordinate.
pub fn gradient_check(net: &Network, input: &[f64], out_weights: &[f64], h: f64) -> f64 {
    let (_, cache) = net.forward(input).unwrap();
    let (grads, input_grad) = net.backward(&cache, out_weights).unwrap();
    let rel = |a: f64, n: f64| (a - n).abs() / a.abs().max(n.abs()).max(1e-6);
    let mut worst: f64 = 0.0;
    for li in 0..net.layers().len() {
        for which in 0..2 {
            let len = if which == 0 {
                net.layers()[li].weights.len()
            } else {
                net.layers()[li].bias.len()
            };
            for j in 0..len {
                let mut plus = net.clone();
                let mut minus = net.clone();
                if which == 0 {
                    plus.layers_mut()[li].weights[j] += h;
                    minus.layers_mut()[li].weights[j] -= h;
                } else {
                    plus.layers_mut()[li].bias[j] += h;
                    minus.layers_mut()[li].bias[j] -= h;
                }
                let numeric = (weighted_output(&plus, input, out_weights)
                    - weighted_output(&minus, input, out_weights))
                    / (2.0 * h);
                let analytic = if which == 0 {
                    grads.layers[li].weights[j]
                } else {
                    grads.layers[li].bias[j]
                };
                worst = worst.max(rel(analytic, numeric));
            }
        }
    }
    for i in 0..input.len() {
        let mut p = input.to_vec();
        let mut m = input.to_vec();
        p[i] += h;
        m[i] -= h;
        let numeric = (weighted_output(net, &p, out_weights)
            - weighted_output(net, &m, out_weights))
            / (2.0 * h);
        worst = worst.max(rel(input_grad[i], numeric));
    }
    worst
}
