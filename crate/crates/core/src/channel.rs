//! Line-of-sight channel model for the UAV → IRS → UE cascade.
//!
//! Each IRS is a uniform linear array of `M` passive elements. The UAV-IRS and
//! IRS-UE links are modelled as free-space LoS channels with a planar
//! angle-of-arrival approximation, and the per-element reflection phases are
//! either aligned exactly (continuous control) or snapped to an `N^I`-level grid
//! (discrete control).
//!
//! All functions here are pure.

use std::f64::consts::{LN_2, PI, TAU};
use std::ops::Deref;

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ChannelError {
    #[error("channel length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("entry {index} has zero magnitude, its phase is undefined")]
    ZeroEntry { index: usize },
    #[error("invalid scenario geometry: {0}")]
    Geometry(String),
    #[error("invalid channel parameter: {0}")]
    Params(String),
}

/// A point in the plane, in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

/// IRS mounting point (height is above ground).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IrsSite {
    pub x: f64,
    pub y: f64,
    pub height: f64,
}

impl IrsSite {
    pub const fn new(x: f64, y: f64, height: f64) -> Self {
        Self { x, y, height }
    }
}

/// Static layout of the service area: UAV altitude, area bounds, IRS sites,
/// UE positions and the number of elements per IRS.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioGeometry {
    pub uav_altitude: f64,
    pub area_x: f64,
    pub area_y: f64,
    pub irs: Vec<IrsSite>,
    pub ues: Vec<Point2>,
    pub elements_per_irs: usize,
}

impl ScenarioGeometry {
    pub fn validate(&self) -> Result<(), ChannelError> {
        let bad = |msg: String| Err(ChannelError::Geometry(msg));
        if !(self.area_x > 0.0 && self.area_y > 0.0) {
            return bad(format!(
                "area {}x{} must be positive",
                self.area_x, self.area_y
            ));
        }
        if !(self.uav_altitude > 0.0) {
            return bad(format!(
                "uav altitude {} must be positive",
                self.uav_altitude
            ));
        }
        if self.elements_per_irs == 0 {
            return bad("at least one element per IRS is required".into());
        }
        if self.irs.is_empty() {
            return bad("at least one IRS is required".into());
        }
        if self.ues.is_empty() {
            return bad("at least one UE is required".into());
        }
        for (k, s) in self.irs.iter().enumerate() {
            if !self.contains(s.x, s.y) {
                return bad(format!(
                    "IRS {k} at ({}, {}) lies outside the area",
                    s.x, s.y
                ));
            }
            if !(s.height > 0.0) {
                return bad(format!("IRS {k} height {} must be positive", s.height));
            }
        }
        for (n, u) in self.ues.iter().enumerate() {
            if !self.contains(u.x, u.y) {
                return bad(format!(
                    "UE {n} at ({}, {}) lies outside the area",
                    u.x, u.y
                ));
            }
        }
        Ok(())
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        (0.0..=self.area_x).contains(&x) && (0.0..=self.area_y).contains(&y)
    }

    pub fn num_irs(&self) -> usize {
        self.irs.len()
    }

    pub fn num_ues(&self) -> usize {
        self.ues.len()
    }

    /// Length of a stacked channel vector, `M·K`.
    pub fn total_elements(&self) -> usize {
        self.elements_per_irs * self.irs.len()
    }
}

/// Link-budget constants, all in linear units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    /// Power gain at the 1 m reference distance.
    pub ref_path_loss: f64,
    /// Path-loss exponent of the IRS-UE link.
    pub ue_path_exponent: f64,
    /// Element spacing over carrier wavelength.
    pub element_spacing_ratio: f64,
    /// Noise power in watts.
    pub noise_power: f64,
    /// UAV transmit power in watts.
    pub tx_power: f64,
}

impl ChannelParams {
    pub fn validate(&self) -> Result<(), ChannelError> {
        let bad = |msg: &str| Err(ChannelError::Params(msg.to_string()));
        if !(self.ref_path_loss > 0.0) {
            return bad("reference path loss must be positive");
        }
        if !(self.ue_path_exponent >= 2.0) {
            return bad("UE path-loss exponent must be at least 2");
        }
        if !(self.element_spacing_ratio > 0.0 && self.element_spacing_ratio <= 1.0) {
            return bad("element spacing ratio must lie in (0, 1]");
        }
        if !(self.noise_power > 0.0) {
            return bad("noise power must be positive");
        }
        if !(self.tx_power > 0.0) {
            return bad("transmit power must be positive");
        }
        Ok(())
    }
}

/// Per-element complex channel gains, either for one IRS (`M` entries) or
/// stacked over all IRSs (`M·K` entries, IRS-major).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ComplexVector(pub Vec<Complex64>);

impl ComplexVector {
    pub fn zeros(len: usize) -> Self {
        Self(vec![Complex64::new(0.0, 0.0); len])
    }

    pub fn into_inner(self) -> Vec<Complex64> {
        self.0
    }
}

impl Deref for ComplexVector {
    type Target = [Complex64];

    fn deref(&self) -> &[Complex64] {
        &self.0
    }
}

impl From<Vec<Complex64>> for ComplexVector {
    fn from(v: Vec<Complex64>) -> Self {
        Self(v)
    }
}

/// Diagonal of the reflection matrix: one phase in `[0, 2π)` per element,
/// ordered like the stacked channel vectors.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PhaseMatrix(pub Vec<f64>);

impl Deref for PhaseMatrix {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vec<f64>> for PhaseMatrix {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

/// Maps any finite angle into `[0, 2π)`.
pub fn wrap_angle(angle: f64) -> f64 {
    let w = angle.rem_euclid(TAU);
    // rem_euclid rounds tiny negatives up to exactly 2π
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Shortest angular separation, in `[0, π]`.
pub fn circular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).abs().rem_euclid(TAU);
    if d > PI {
        TAU - d
    } else {
        d
    }
}

/// 3-D distance between the UAV (at its fixed altitude) and IRS `k`.
pub fn dist_uav_irs(uav: Point2, k: usize, geom: &ScenarioGeometry) -> f64 {
    let s = &geom.irs[k];
    let dz = geom.uav_altitude - s.height;
    ((uav.x - s.x).powi(2) + (uav.y - s.y).powi(2) + dz * dz).sqrt()
}

/// 3-D distance between IRS `k` and UE `n` (UE at ground level).
pub fn dist_irs_ue(k: usize, n: usize, geom: &ScenarioGeometry) -> f64 {
    let s = &geom.irs[k];
    let u = &geom.ues[n];
    ((s.x - u.x).powi(2) + (s.y - u.y).powi(2) + s.height * s.height).sqrt()
}

// entry m = amplitude · exp(-j·2π·(d/λ)·m·cos_aoa)
fn ula_response(amplitude: f64, cos_aoa: f64, spacing_ratio: f64, len: usize) -> ComplexVector {
    let step = -TAU * spacing_ratio * cos_aoa;
    (0..len)
        .map(|m| Complex64::from_polar(amplitude, step * m as f64))
        .collect::<Vec<_>>()
        .into()
}

/// UAV → IRS `k` channel, one entry per element of that IRS.
pub fn channel_uav_irs(
    uav: Point2,
    k: usize,
    geom: &ScenarioGeometry,
    params: &ChannelParams,
) -> ComplexVector {
    let d = dist_uav_irs(uav, k, geom);
    let amplitude = (params.ref_path_loss / (d * d)).sqrt();
    let cos_aoa = (geom.irs[k].x - uav.x) / d;
    ula_response(
        amplitude,
        cos_aoa,
        params.element_spacing_ratio,
        geom.elements_per_irs,
    )
}

/// IRS `k` → UE `n` channel, one entry per element of that IRS.
pub fn channel_irs_ue(
    k: usize,
    n: usize,
    geom: &ScenarioGeometry,
    params: &ChannelParams,
) -> ComplexVector {
    let d = dist_irs_ue(k, n, geom);
    let amplitude = (params.ref_path_loss / d.powf(params.ue_path_exponent)).sqrt();
    let cos_aod = (geom.irs[k].x - geom.ues[n].x) / d;
    ula_response(
        amplitude,
        cos_aod,
        params.element_spacing_ratio,
        geom.elements_per_irs,
    )
}

/// Concatenates per-IRS channels in IRS order.
pub fn stack_channels(per_irs: &[ComplexVector]) -> Result<ComplexVector, ChannelError> {
    let Some(first) = per_irs.first() else {
        return Ok(ComplexVector::default());
    };
    let m = first.len();
    let mut out = Vec::with_capacity(m * per_irs.len());
    for v in per_irs {
        if v.len() != m {
            return Err(ChannelError::LengthMismatch {
                expected: m,
                actual: v.len(),
            });
        }
        out.extend_from_slice(v);
    }
    Ok(out.into())
}

/// Splits a stacked channel back into `k` equal per-IRS pieces.
pub fn unstack_channels(
    stacked: &ComplexVector,
    k: usize,
) -> Result<Vec<ComplexVector>, ChannelError> {
    if k == 0 || !stacked.len().is_multiple_of(k) {
        return Err(ChannelError::LengthMismatch {
            expected: k.max(1) * (stacked.len() / k.max(1)),
            actual: stacked.len(),
        });
    }
    Ok(stacked
        .chunks(stacked.len() / k)
        .map(|c| ComplexVector(c.to_vec()))
        .collect())
}

/// Phase of every entry, in `[0, 2π)`.
pub fn element_phases(v: &ComplexVector) -> Result<Vec<f64>, ChannelError> {
    v.iter()
        .enumerate()
        .map(|(index, c)| {
            if c.norm() == 0.0 {
                Err(ChannelError::ZeroEntry { index })
            } else {
                Ok(wrap_angle(c.arg()))
            }
        })
        .collect()
}

/// Continuous passive beamforming: `θ = (ω_UI + ω_IE) mod 2π` per element,
/// which makes every reflected path add in phase at the UE (see [`composite_gain`]).
pub fn align_phases(
    h_ui: &ComplexVector,
    h_ie: &ComplexVector,
) -> Result<PhaseMatrix, ChannelError> {
    check_len(h_ui.len(), h_ie.len())?;
    let w_ui = element_phases(h_ui)?;
    let w_ie = element_phases(h_ie)?;
    Ok(w_ui
        .iter()
        .zip(&w_ie)
        .map(|(a, b)| wrap_angle(a + b))
        .collect::<Vec<_>>()
        .into())
}

/// Snaps every phase to the nearest of `levels` equally spaced values
/// `2πi/levels`, measuring distance around the circle. Ties go to the smaller
/// grid index.
pub fn quantize_phases(continuous: &PhaseMatrix, levels: usize) -> PhaseMatrix {
    assert!(levels >= 1, "phase grid needs at least one level");
    let step = TAU / levels as f64;
    continuous
        .iter()
        .map(|&target| {
            let mut best = 0usize;
            let mut best_dist = circular_distance(target, 0.0);
            for i in 1..levels {
                let dist = circular_distance(target, step * i as f64);
                if dist < best_dist {
                    best = i;
                    best_dist = dist;
                }
            }
            step * best as f64
        })
        .collect::<Vec<_>>()
        .into()
}

/// Cascaded scalar gain `Σ_e h_IE[e] · exp(-jθ_e) · h_UI[e]`.
///
/// The reflection applies `exp(-jθ)`, so the alignment rule
/// `θ = ω_UI + ω_IE` cancels both link phases and every term is real positive.
pub fn composite_gain(
    h_ui: &ComplexVector,
    h_ie: &ComplexVector,
    theta: &PhaseMatrix,
) -> Complex64 {
    h_ui.iter()
        .zip(h_ie.iter())
        .zip(theta.iter())
        .map(|((ui, ie), &t)| ie * Complex64::from_polar(1.0, -t) * ui)
        .sum()
}

/// Achievable rate in bits/s/Hz for one UE under the given reflection phases.
pub fn data_rate(
    h_ui: &ComplexVector,
    h_ie: &ComplexVector,
    theta: &PhaseMatrix,
    params: &ChannelParams,
) -> Result<f64, ChannelError> {
    check_len(h_ui.len(), h_ie.len())?;
    check_len(h_ui.len(), theta.len())?;
    let snr = params.tx_power * composite_gain(h_ui, h_ie, theta).norm_sqr() / params.noise_power;
    Ok(snr.ln_1p() / LN_2)
}

/// Jain's index over cumulative per-UE service counts. All-zero counts give 0.
pub fn jain_fairness(serve_counts: &[u64]) -> f64 {
    let n = serve_counts.len() as f64;
    let sum: f64 = serve_counts.iter().map(|&c| c as f64).sum();
    let sum_sq: f64 = serve_counts.iter().map(|&c| (c as f64) * (c as f64)).sum();
    if sum_sq == 0.0 {
        0.0
    } else {
        sum * sum / (n * sum_sq)
    }
}

/// Index of the UE with the highest rate; the lowest index wins ties.
pub fn best_ue(rates: &[f64]) -> usize {
    let mut best = 0;
    for (i, &r) in rates.iter().enumerate().skip(1) {
        if r > rates[best] {
            best = i;
        }
    }
    best
}

fn check_len(expected: usize, actual: usize) -> Result<(), ChannelError> {
    if expected == actual {
        Ok(())
    } else {
        Err(ChannelError::LengthMismatch { expected, actual })
    }
}
