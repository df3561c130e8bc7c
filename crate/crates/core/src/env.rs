//! Episodic UAV dynamics: planar motion, rotary-wing propulsion energy, UE
//! scheduling with Jain fairness, and the per-slot reward.

use std::f64::consts::TAU;

use thiserror::Error;

use crate::channel::{
    self, align_phases, best_ue, channel_irs_ue, channel_uav_irs, data_rate, jain_fairness,
    quantize_phases, stack_channels, ChannelError, ChannelParams, ComplexVector, Point2,
    ScenarioGeometry,
};

#[derive(Debug, Error, PartialEq)]
pub enum EnvError {
    #[error("episode already finished (energy {energy} J)")]
    EpisodeDone { energy: f64 },
    #[error("start position ({x}, {y}) lies outside the service area")]
    StartOutsideArea { x: f64, y: f64 },
    #[error("illegal action: angle {angle} rad, distance {distance} m")]
    IllegalAction { angle: f64, distance: f64 },
    #[error("invalid {field}: {value}")]
    InvalidParameter { field: &'static str, value: f64 },
    #[error(transparent)]
    Channel(#[from] ChannelError),
}

/// Rotary-wing propulsion model constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyModel {
    /// Blade profile power in hover (W).
    pub blade_power: f64,
    /// Induced power in hover (W).
    pub induced_power: f64,
    /// Rotor blade tip speed (m/s).
    pub tip_speed: f64,
    /// Mean rotor induced velocity in hover (m/s).
    pub hover_induced_velocity: f64,
    pub body_drag_ratio: f64,
    /// kg/m³
    pub air_density: f64,
    pub rotor_solidity: f64,
    /// m²
    pub rotor_area: f64,
    /// Seconds per time slot.
    pub slot_duration: f64,
    /// Usable energy budget per episode (J).
    pub max_energy: f64,
}

impl EnergyModel {
    pub const TABLE_II: EnergyModel = EnergyModel {
        blade_power: 79.85,
        induced_power: 88.63,
        tip_speed: 120.0,
        hover_induced_velocity: 4.03,
        body_drag_ratio: 0.6,
        air_density: 1.225,
        rotor_solidity: 0.05,
        rotor_area: 0.503,
        slot_duration: 1.0,
        max_energy: 20_000.0,
    };

    pub fn validate(&self) -> Result<(), EnvError> {
        let fields = [
            ("blade power", self.blade_power),
            ("induced power", self.induced_power),
            ("tip speed", self.tip_speed),
            ("hover induced velocity", self.hover_induced_velocity),
            ("body drag ratio", self.body_drag_ratio),
            ("air density", self.air_density),
            ("rotor solidity", self.rotor_solidity),
            ("rotor area", self.rotor_area),
            ("slot duration", self.slot_duration),
            ("max energy", self.max_energy),
        ];
        for (field, value) in fields {
            if !(value > 0.0 && value.is_finite()) {
                return Err(EnvError::InvalidParameter { field, value });
            }
        }
        Ok(())
    }

    /// Smallest per-slot energy over speeds in `[0, max_speed]`, found by a
    /// fine grid scan. Forward flight below a few tens of m/s is cheaper than
    /// hovering, so this can be well under `propulsion_energy(0)`.
    pub fn min_slot_energy(&self, max_speed: f64) -> f64 {
        const STEPS: usize = 40_000;
        (0..=STEPS)
            .map(|i| propulsion_energy(max_speed * i as f64 / STEPS as f64, self))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Propulsion energy (J) spent during one slot flown at constant speed `v`.
pub fn propulsion_energy(v: f64, model: &EnergyModel) -> f64 {
    let blade = model.blade_power * (1.0 + 3.0 * (v / model.tip_speed).powi(2));
    let r2 = (v / model.hover_induced_velocity).powi(2);
    let induced = model.induced_power * ((1.0 + 0.25 * r2 * r2).sqrt() - 0.5 * r2).sqrt();
    let parasite = 0.5
        * model.body_drag_ratio
        * model.air_density
        * model.rotor_solidity
        * model.rotor_area
        * v.powi(3);
    (blade + induced + parasite) * model.slot_duration
}

/// Flying direction (rad, `[0, 2π)`) and distance (m) for one slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Action {
    pub angle: f64,
    pub distance: f64,
}

impl Action {
    pub const fn new(angle: f64, distance: f64) -> Self {
        Self { angle, distance }
    }

    pub fn is_legal(&self, max_distance: f64) -> bool {
        (0.0..TAU).contains(&self.angle) && (0.0..=max_distance).contains(&self.distance)
    }
}

/// Reward weights: fairness weight `k_i`, rate weight `k_q`, boundary penalty `p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RewardConfig {
    pub fairness_weight: f64,
    pub rate_weight: f64,
    pub penalty: f64,
}

impl RewardConfig {
    pub const TABLE_II: RewardConfig = RewardConfig {
        fairness_weight: 100.0,
        rate_weight: 1.0,
        penalty: 1.0,
    };

    pub fn validate(&self) -> Result<(), EnvError> {
        if !(self.fairness_weight > 0.0) {
            return Err(EnvError::InvalidParameter {
                field: "fairness weight",
                value: self.fairness_weight,
            });
        }
        if !(self.rate_weight >= 0.0) {
            return Err(EnvError::InvalidParameter {
                field: "rate weight",
                value: self.rate_weight,
            });
        }
        if !(self.penalty >= 0.0) {
            return Err(EnvError::InvalidParameter {
                field: "penalty",
                value: self.penalty,
            });
        }
        Ok(())
    }

    /// `f + (k_q / k_i)·R − p·[out of bounds]`
    pub fn reward(&self, fairness: f64, served_rate: f64, out_of_bounds: bool) -> f64 {
        let penalty = if out_of_bounds { self.penalty } else { 0.0 };
        fairness + self.rate_weight / self.fairness_weight * served_rate - penalty
    }
}

/// How the IRS phases are chosen for each UE.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseStrategy {
    /// Exact alignment.
    Continuous,
    /// Alignment snapped to `levels` equally spaced phases.
    Quantized { levels: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnvState {
    pub x: f64,
    pub y: f64,
    /// Remaining energy; drops to zero or below on the final slot.
    pub energy: f64,
    pub serve_counts: Vec<u64>,
    pub ts: u64,
}

impl EnvState {
    pub fn position(&self) -> Point2 {
        Point2::new(self.x, self.y)
    }

    pub fn is_done(&self) -> bool {
        self.energy <= 0.0
    }

    /// Fairness of the service history so far (0 before anyone is served).
    pub fn fairness(&self) -> f64 {
        jain_fairness(&self.serve_counts)
    }
}

/// Everything one slot produced.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub next: EnvState,
    pub reward: f64,
    pub rates: Vec<f64>,
    pub served: usize,
    pub fairness: f64,
    pub out_of_bounds: bool,
    pub done: bool,
}

impl StepOutcome {
    pub fn served_rate(&self) -> f64 {
        self.rates[self.served]
    }
}

/// The simulated system. Stepping is a pure function of `(state, action)`,
/// so lookahead policies can evaluate hypothetical moves freely.
#[derive(Debug, Clone)]
pub struct Env {
    geom: ScenarioGeometry,
    params: ChannelParams,
    energy: EnergyModel,
    reward: RewardConfig,
    max_distance: f64,
    // IRS → UE channels do not depend on the UAV, so they are built once.
    ue_channels: Vec<ComplexVector>,
}

impl Env {
    pub fn new(
        geom: ScenarioGeometry,
        params: ChannelParams,
        energy: EnergyModel,
        reward: RewardConfig,
        max_distance: f64,
    ) -> Result<Self, EnvError> {
        geom.validate()?;
        params.validate()?;
        energy.validate()?;
        reward.validate()?;
        if !(max_distance > 0.0) {
            return Err(EnvError::InvalidParameter {
                field: "max flying distance",
                value: max_distance,
            });
        }
        let ue_channels = (0..geom.num_ues())
            .map(|n| {
                let per_irs: Vec<_> = (0..geom.num_irs())
                    .map(|k| channel_irs_ue(k, n, &geom, &params))
                    .collect();
                stack_channels(&per_irs)
            })
            .collect::<Result<_, _>>()?;
        Ok(Self {
            geom,
            params,
            energy,
            reward,
            max_distance,
            ue_channels,
        })
    }

    pub fn geometry(&self) -> &ScenarioGeometry {
        &self.geom
    }

    pub fn channel_params(&self) -> &ChannelParams {
        &self.params
    }

    pub fn energy_model(&self) -> &EnergyModel {
        &self.energy
    }

    pub fn reward_config(&self) -> &RewardConfig {
        &self.reward
    }

    pub fn max_distance(&self) -> f64 {
        self.max_distance
    }

    pub fn reset(&self, start: Point2) -> Result<EnvState, EnvError> {
        if !self.geom.contains(start.x, start.y) {
            return Err(EnvError::StartOutsideArea {
                x: start.x,
                y: start.y,
            });
        }
        Ok(EnvState {
            x: start.x,
            y: start.y,
            energy: self.energy.max_energy,
            serve_counts: vec![0; self.geom.num_ues()],
            ts: 0,
        })
    }

    /// Normalized observation `(x/X, y/Y, e/e_max)`, each clamped to `[0, 1]`.
    pub fn observe(&self, state: &EnvState) -> [f64; 3] {
        [
            (state.x / self.geom.area_x).clamp(0.0, 1.0),
            (state.y / self.geom.area_y).clamp(0.0, 1.0),
            (state.energy / self.energy.max_energy).clamp(0.0, 1.0),
        ]
    }

    /// Moves the UAV, clamping to the area. Returns the new position and
    /// whether the commanded move would have left the area.
    pub fn apply_motion(&self, from: Point2, action: Action) -> (Point2, bool) {
        let tx = from.x + action.distance * action.angle.cos();
        let ty = from.y + action.distance * action.angle.sin();
        let out = !self.geom.contains(tx, ty);
        let to = Point2::new(
            tx.clamp(0.0, self.geom.area_x),
            ty.clamp(0.0, self.geom.area_y),
        );
        (to, out)
    }

    /// Per-UE achievable rates with the UAV at `uav`.
    pub fn rates_at(&self, uav: Point2, strategy: PhaseStrategy) -> Result<Vec<f64>, EnvError> {
        let per_irs: Vec<_> = (0..self.geom.num_irs())
            .map(|k| channel_uav_irs(uav, k, &self.geom, &self.params))
            .collect();
        let h_ui = stack_channels(&per_irs)?;
        self.ue_channels
            .iter()
            .map(|h_ie| {
                let aligned = align_phases(&h_ui, h_ie)?;
                let theta = match strategy {
                    PhaseStrategy::Continuous => aligned,
                    PhaseStrategy::Quantized { levels } => quantize_phases(&aligned, levels),
                };
                Ok(data_rate(&h_ui, h_ie, &theta, &self.params)?)
            })
            .collect()
    }

    /// One time slot.
    pub fn step(
        &self,
        state: &EnvState,
        action: Action,
        strategy: PhaseStrategy,
    ) -> Result<StepOutcome, EnvError> {
        if state.is_done() {
            return Err(EnvError::EpisodeDone {
                energy: state.energy,
            });
        }
        if !action.is_legal(self.max_distance) {
            return Err(EnvError::IllegalAction {
                angle: action.angle,
                distance: action.distance,
            });
        }
        let (pos, out_of_bounds) = self.apply_motion(state.position(), action);
        // charged for the commanded distance, even when clamped
        let speed = action.distance / self.energy.slot_duration;
        let energy = state.energy - propulsion_energy(speed, &self.energy);

        let rates = self.rates_at(pos, strategy)?;
        let served = best_ue(&rates);
        let mut serve_counts = state.serve_counts.clone();
        serve_counts[served] += 1;
        let fairness = channel::jain_fairness(&serve_counts);
        let reward = self.reward.reward(fairness, rates[served], out_of_bounds);

        let next = EnvState {
            x: pos.x,
            y: pos.y,
            energy,
            serve_counts,
            ts: state.ts + 1,
        };
        let done = next.is_done();
        Ok(StepOutcome {
            next,
            reward,
            rates,
            served,
            fairness,
            out_of_bounds,
            done,
        })
    }
}
