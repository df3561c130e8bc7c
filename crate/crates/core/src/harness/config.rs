//! Flat `name = value` experiment configuration.
//!
//! Every key is optional; anything left out comes from the selected preset
//! (`preset = table2 | table2-3irs | desk`, default `table2`). Decibel inputs are
//! converted to linear units at load time.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::agents::{DdpgConfig, DiscreteActionTable, DqnConfig};
use crate::channel::{ChannelParams, IrsSite, Point2, ScenarioGeometry};
use crate::env::{EnergyModel, Env, PhaseStrategy, RewardConfig};

use super::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Dqn,
    Ddpg,
    Greedy,
    Random,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::Dqn,
        Algorithm::Ddpg,
        Algorithm::Greedy,
        Algorithm::Random,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Dqn => "dqn",
            Algorithm::Ddpg => "ddpg",
            Algorithm::Greedy => "greedy",
            Algorithm::Random => "random",
        }
    }

    /// DDPG steers continuously and aligns phases exactly; the others use the
    /// discrete table and quantized phases.
    pub fn is_continuous(self) -> bool {
        self == Algorithm::Ddpg
    }

    pub fn needs_checkpoint(self) -> bool {
        matches!(self, Algorithm::Dqn | Algorithm::Ddpg)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "dqn" => Ok(Algorithm::Dqn),
            "ddpg" => Ok(Algorithm::Ddpg),
            "greedy" => Ok(Algorithm::Greedy),
            "random" => Ok(Algorithm::Random),
            other => Err(format!(
                "unknown algorithm '{other}' (expected dqn, ddpg, greedy or random)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Six IRSs and six UEs at full scale.
    TableII,
    /// Same, restricted to the first three IRSs.
    TableIIThreeIrs,
    /// Reduced scenario that trains in minutes.
    Desk,
}

impl FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "table2" => Ok(Preset::TableII),
            "table2-3irs" => Ok(Preset::TableIIThreeIrs),
            "desk" => Ok(Preset::Desk),
            other => Err(format!(
                "unknown preset '{other}' (expected table2, table2-3irs or desk)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub algorithm: Algorithm,
    pub seed: u64,
    pub geometry: ScenarioGeometry,
    pub start: Point2,
    pub channel: ChannelParams,
    pub energy: EnergyModel,
    pub reward: RewardConfig,
    pub max_distance: f64,
    /// Nominal slot count `T`; episodes end on energy, so this is informational.
    pub nominal_slots: u64,
    pub directions: usize,
    pub distance_levels: usize,
    pub phase_levels: usize,
    pub episodes: usize,
    pub epsilon: f64,
    pub noise_scale: f64,
    pub noise_decay: f64,
    pub gamma: f64,
    pub batch_size: usize,
    pub memory_capacity: usize,
    pub dqn_hidden: Vec<usize>,
    pub actor_hidden: Vec<usize>,
    pub critic_hidden: Vec<usize>,
    pub dqn_learning_rate: f64,
    pub actor_learning_rate: f64,
    pub critic_learning_rate: f64,
    pub target_update_period: u64,
    pub tau: f64,
    /// Episodes between intermediate checkpoints; 0 writes only the final one.
    pub checkpoint_interval: usize,
    pub smoothing_window: usize,
    pub output_dir: Option<PathBuf>,
}

const FULL_IRS: [IrsSite; 6] = [
    IrsSite::new(100.0, 0.0, 100.0),
    IrsSite::new(300.0, 0.0, 100.0),
    IrsSite::new(500.0, 0.0, 100.0),
    IrsSite::new(100.0, 200.0, 100.0),
    IrsSite::new(300.0, 200.0, 100.0),
    IrsSite::new(500.0, 200.0, 100.0),
];

const FULL_UES: [Point2; 6] = [
    Point2::new(100.0, 50.0),
    Point2::new(300.0, 50.0),
    Point2::new(500.0, 50.0),
    Point2::new(100.0, 150.0),
    Point2::new(300.0, 150.0),
    Point2::new(500.0, 150.0),
];

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    db_to_linear(dbm - 30.0)
}

impl ExperimentConfig {
    pub fn table2() -> Self {
        Self {
            algorithm: Algorithm::Dqn,
            seed: 0,
            geometry: ScenarioGeometry {
                uav_altitude: 200.0,
                area_x: 600.0,
                area_y: 200.0,
                irs: FULL_IRS.to_vec(),
                ues: FULL_UES.to_vec(),
                elements_per_irs: 20,
            },
            start: Point2::new(10.0, 10.0),
            channel: ChannelParams {
                ref_path_loss: db_to_linear(-30.0),
                ue_path_exponent: 2.8,
                element_spacing_ratio: 0.5,
                noise_power: dbm_to_watts(-70.0),
                tx_power: 0.01,
            },
            energy: EnergyModel::TABLE_II,
            reward: RewardConfig::TABLE_II,
            max_distance: 40.0,
            nominal_slots: 50,
            directions: 6,
            distance_levels: 3,
            phase_levels: 12,
            episodes: 10_000,
            epsilon: 0.9,
            noise_scale: 1.3,
            noise_decay: 0.9995,
            gamma: 0.99,
            batch_size: 128,
            memory_capacity: 200_000,
            dqn_hidden: vec![400, 300, 64],
            actor_hidden: vec![400, 300, 256, 128],
            critic_hidden: vec![400, 300, 256, 128],
            dqn_learning_rate: 1e-5,
            actor_learning_rate: 1e-4,
            critic_learning_rate: 2e-4,
            target_update_period: 200,
            tau: 0.01,
            checkpoint_interval: 0,
            smoothing_window: 100,
            output_dir: None,
        }
    }

    pub fn table2_three_irs() -> Self {
        let mut cfg = Self::table2();
        cfg.geometry.irs.truncate(3);
        cfg
    }

    /// Two IRSs, three UEs, 8 elements each, `[64, 64]` hidden layers,
    /// 300 episodes and a 4 kJ budget (about 10–30 slots per episode).
    ///
    /// The area shrinks to 400 m × 200 m. Exploration noise starts at 0.5
    /// because the per-slot decay only covers about 9k slots here. The
    /// boundary penalty doubles so it keeps the same ratio to the 1/N
    /// fairness floor as with six UEs.
    pub fn desk() -> Self {
        let mut cfg = Self::table2();
        cfg.geometry.area_x = 400.0;
        cfg.geometry.irs = vec![
            IrsSite::new(100.0, 0.0, 100.0),
            IrsSite::new(300.0, 0.0, 100.0),
        ];
        cfg.geometry.ues = vec![
            Point2::new(100.0, 50.0),
            Point2::new(300.0, 50.0),
            Point2::new(200.0, 150.0),
        ];
        cfg.geometry.elements_per_irs = 8;
        cfg.energy.max_energy = 4000.0;
        cfg.reward.penalty = 2.0;
        cfg.episodes = 300;
        cfg.dqn_hidden = vec![64, 64];
        cfg.actor_hidden = vec![64, 64];
        cfg.critic_hidden = vec![64, 64];
        cfg.dqn_learning_rate = 1e-3;
        cfg.actor_learning_rate = 1e-4;
        cfg.critic_learning_rate = 1e-3;
        cfg.noise_scale = 0.5;
        cfg.smoothing_window = 50;
        cfg
    }

    pub fn preset(p: Preset) -> Self {
        match p {
            Preset::TableII => Self::table2(),
            Preset::TableIIThreeIrs => Self::table2_three_irs(),
            Preset::Desk => Self::desk(),
        }
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Ok(Self::parse(&text)?)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut entries = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError::Syntax {
                    line: i + 1,
                    message: format!("expected 'name = value', found '{line}'"),
                });
            };
            entries.push((i + 1, key.trim().to_string(), value.trim().to_string()));
        }

        let mut preset = Preset::TableII;
        for (line, key, value) in &entries {
            if key == "preset" {
                preset = value.parse().map_err(|message| ConfigError::Syntax {
                    line: *line,
                    message,
                })?;
            }
        }
        let mut cfg = Self::preset(preset);
        let base_irs = cfg.geometry.irs.clone();
        let base_ues = cfg.geometry.ues.clone();

        let mut irs_count = None;
        let mut ue_count = None;
        let mut irs_given = false;
        let mut ues_given = false;
        let mut seen = std::collections::HashSet::new();

        for (line, key, value) in &entries {
            let line = *line;
            if !seen.insert(key.clone()) {
                return Err(ConfigError::Syntax {
                    line,
                    message: format!("duplicate key '{key}'"),
                });
            }
            let num = || parse_num::<f64>(line, key, value);
            match key.as_str() {
                "preset" => {}
                "algo" => {
                    cfg.algorithm = value
                        .parse()
                        .map_err(|message| ConfigError::Syntax { line, message })?;
                }
                "seed" => cfg.seed = parse_num(line, key, value)?,
                "K" => irs_count = Some(parse_num::<usize>(line, key, value)?),
                "N" => ue_count = Some(parse_num::<usize>(line, key, value)?),
                "M" => cfg.geometry.elements_per_irs = parse_num(line, key, value)?,
                "x_max" => cfg.geometry.area_x = num()?,
                "y_max" => cfg.geometry.area_y = num()?,
                "start_x" => cfg.start.x = num()?,
                "start_y" => cfg.start.y = num()?,
                "uav_altitude" => cfg.geometry.uav_altitude = num()?,
                "irs_positions" => {
                    cfg.geometry.irs = parse_points::<3>(line, value)?
                        .into_iter()
                        .map(|[x, y, h]| IrsSite::new(x, y, h))
                        .collect();
                    irs_given = true;
                }
                "ue_positions" => {
                    cfg.geometry.ues = parse_points::<2>(line, value)?
                        .into_iter()
                        .map(|[x, y]| Point2::new(x, y))
                        .collect();
                    ues_given = true;
                }
                "slot_duration" => cfg.energy.slot_duration = num()?,
                "T" => cfg.nominal_slots = parse_num(line, key, value)?,
                "d_max" => cfg.max_distance = num()?,
                "beta" => cfg.channel.ue_path_exponent = num()?,
                "alpha_db" => cfg.channel.ref_path_loss = db_to_linear(num()?),
                "spacing_ratio" => cfg.channel.element_spacing_ratio = num()?,
                "noise_dbm" => cfg.channel.noise_power = dbm_to_watts(num()?),
                "tx_power" => cfg.channel.tx_power = num()?,
                "p_s" => cfg.energy.blade_power = num()?,
                "p_m" => cfg.energy.induced_power = num()?,
                "u_r" => cfg.energy.tip_speed = num()?,
                "v_h" => cfg.energy.hover_induced_velocity = num()?,
                "d_0" => cfg.energy.body_drag_ratio = num()?,
                "rho_a" => cfg.energy.air_density = num()?,
                "z" => cfg.energy.rotor_solidity = num()?,
                "rotor_area" => cfg.energy.rotor_area = num()?,
                "e_max" => cfg.energy.max_energy = num()?,
                "k_i" => cfg.reward.fairness_weight = num()?,
                "k_q" => cfg.reward.rate_weight = num()?,
                "penalty" => cfg.reward.penalty = num()?,
                "n_mu" => cfg.directions = parse_num(line, key, value)?,
                "n_d" => cfg.distance_levels = parse_num(line, key, value)?,
                "n_i" => cfg.phase_levels = parse_num(line, key, value)?,
                "episodes" => cfg.episodes = parse_num(line, key, value)?,
                "epsilon" => cfg.epsilon = num()?,
                "noise_scale" => cfg.noise_scale = num()?,
                "noise_decay" => cfg.noise_decay = num()?,
                "gamma" => cfg.gamma = num()?,
                "batch_size" => cfg.batch_size = parse_num(line, key, value)?,
                "memory_capacity" => cfg.memory_capacity = parse_num(line, key, value)?,
                "dqn_hidden" => cfg.dqn_hidden = parse_list(line, key, value)?,
                "actor_hidden" => cfg.actor_hidden = parse_list(line, key, value)?,
                "critic_hidden" => cfg.critic_hidden = parse_list(line, key, value)?,
                "lr_dqn" => cfg.dqn_learning_rate = num()?,
                "lr_actor" => cfg.actor_learning_rate = num()?,
                "lr_critic" => cfg.critic_learning_rate = num()?,
                "target_update_period" => cfg.target_update_period = parse_num(line, key, value)?,
                "tau" => cfg.tau = num()?,
                "checkpoint_interval" => cfg.checkpoint_interval = parse_num(line, key, value)?,
                "smoothing_window" => cfg.smoothing_window = parse_num(line, key, value)?,
                "output_dir" => cfg.output_dir = Some(PathBuf::from(value)),
                _ => {
                    return Err(ConfigError::UnknownKey {
                        line,
                        key: key.clone(),
                    })
                }
            }
        }

        resolve_count(&mut cfg.geometry.irs, &base_irs, irs_count, irs_given, "K")?;
        resolve_count(&mut cfg.geometry.ues, &base_ues, ue_count, ues_given, "N")?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks every physical and learning parameter, naming the offending key.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let positive = [
            ("x_max", self.geometry.area_x),
            ("y_max", self.geometry.area_y),
            ("uav_altitude", self.geometry.uav_altitude),
            ("d_max", self.max_distance),
            ("alpha_db", self.channel.ref_path_loss),
            ("noise_dbm", self.channel.noise_power),
            ("tx_power", self.channel.tx_power),
            ("slot_duration", self.energy.slot_duration),
            ("p_s", self.energy.blade_power),
            ("p_m", self.energy.induced_power),
            ("u_r", self.energy.tip_speed),
            ("v_h", self.energy.hover_induced_velocity),
            ("d_0", self.energy.body_drag_ratio),
            ("rho_a", self.energy.air_density),
            ("z", self.energy.rotor_solidity),
            ("rotor_area", self.energy.rotor_area),
            ("e_max", self.energy.max_energy),
            ("k_i", self.reward.fairness_weight),
            ("lr_dqn", self.dqn_learning_rate),
            ("lr_actor", self.actor_learning_rate),
            ("lr_critic", self.critic_learning_rate),
            ("noise_decay", self.noise_decay),
        ];
        for (key, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(key, format!("must be positive, got {v}")));
            }
        }
        let non_negative = [
            ("k_q", self.reward.rate_weight),
            ("penalty", self.reward.penalty),
            ("noise_scale", self.noise_scale),
        ];
        for (key, v) in non_negative {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(invalid(key, format!("must be non-negative, got {v}")));
            }
        }
        let counts = [
            ("K", self.geometry.irs.len()),
            ("N", self.geometry.ues.len()),
            ("M", self.geometry.elements_per_irs),
            ("n_mu", self.directions),
            ("n_d", self.distance_levels),
            ("n_i", self.phase_levels),
            ("batch_size", self.batch_size),
            ("memory_capacity", self.memory_capacity),
        ];
        for (key, v) in counts {
            if v == 0 {
                return Err(invalid(key, "must be at least 1".into()));
            }
        }
        if !(self.channel.ue_path_exponent >= 2.0) {
            return Err(invalid(
                "beta",
                format!("must be at least 2, got {}", self.channel.ue_path_exponent),
            ));
        }
        let r = self.channel.element_spacing_ratio;
        if !(r > 0.0 && r <= 1.0) {
            return Err(invalid(
                "spacing_ratio",
                format!("must lie in (0, 1], got {r}"),
            ));
        }
        for (key, v) in [("epsilon", self.epsilon), ("gamma", self.gamma)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(invalid(key, format!("must lie in [0, 1], got {v}")));
            }
        }
        if !(self.noise_decay <= 1.0) {
            return Err(invalid(
                "noise_decay",
                format!("must not exceed 1, got {}", self.noise_decay),
            ));
        }
        if !(self.tau > 0.0 && self.tau <= 1.0) {
            return Err(invalid(
                "tau",
                format!("must lie in (0, 1], got {}", self.tau),
            ));
        }
        for (key, widths) in [
            ("dqn_hidden", &self.dqn_hidden),
            ("actor_hidden", &self.actor_hidden),
            ("critic_hidden", &self.critic_hidden),
        ] {
            if widths.contains(&0) {
                return Err(invalid(key, "layer widths must be positive".into()));
            }
        }
        for (k, s) in self.geometry.irs.iter().enumerate() {
            if !self.geometry.contains(s.x, s.y) || !(s.height > 0.0) {
                return Err(invalid(
                    "irs_positions",
                    format!(
                        "IRS {k} at ({}, {}, {}) is outside the area or not above ground",
                        s.x, s.y, s.height
                    ),
                ));
            }
        }
        for (n, u) in self.geometry.ues.iter().enumerate() {
            if !self.geometry.contains(u.x, u.y) {
                return Err(invalid(
                    "ue_positions",
                    format!("UE {n} at ({}, {}) is outside the area", u.x, u.y),
                ));
            }
        }
        if !self.geometry.contains(self.start.x, self.start.y) {
            return Err(invalid(
                "start_x",
                format!(
                    "start ({}, {}) is outside the area",
                    self.start.x, self.start.y
                ),
            ));
        }
        Ok(())
    }

    pub fn build_env(&self) -> Result<Env, HarnessError> {
        Ok(Env::new(
            self.geometry.clone(),
            self.channel,
            self.energy,
            self.reward,
            self.max_distance,
        )?)
    }

    pub fn action_table(&self) -> DiscreteActionTable {
        DiscreteActionTable::new(self.directions, self.distance_levels, self.max_distance)
    }

    pub fn phase_strategy(&self) -> PhaseStrategy {
        if self.algorithm.is_continuous() {
            PhaseStrategy::Continuous
        } else {
            PhaseStrategy::Quantized {
                levels: self.phase_levels,
            }
        }
    }

    pub fn dqn_config(&self) -> DqnConfig {
        DqnConfig {
            hidden: self.dqn_hidden.clone(),
            learning_rate: self.dqn_learning_rate,
            exploit_probability: self.epsilon,
            gamma: self.gamma,
            target_update_period: self.target_update_period,
            batch_size: self.batch_size,
            memory_capacity: self.memory_capacity,
        }
    }

    pub fn ddpg_config(&self) -> DdpgConfig {
        DdpgConfig {
            actor_hidden: self.actor_hidden.clone(),
            critic_hidden: self.critic_hidden.clone(),
            actor_learning_rate: self.actor_learning_rate,
            critic_learning_rate: self.critic_learning_rate,
            gamma: self.gamma,
            tau: self.tau,
            noise_scale: self.noise_scale,
            noise_decay: self.noise_decay,
            batch_size: self.batch_size,
            memory_capacity: self.memory_capacity,
            max_distance: self.max_distance,
        }
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown key '{key}'")]
    UnknownKey { line: usize, key: String },
    #[error("invalid '{key}': {message}")]
    Invalid { key: String, message: String },
}

fn invalid(key: &str, message: String) -> ConfigError {
    ConfigError::Invalid {
        key: key.to_string(),
        message,
    }
}

fn parse_num<T: FromStr>(line: usize, key: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: fmt::Display,
{
    value.parse().map_err(|e| ConfigError::Syntax {
        line,
        message: format!("bad value for '{key}': '{value}' ({e})"),
    })
}

fn parse_list(line: usize, key: &str, value: &str) -> Result<Vec<usize>, ConfigError> {
    if value.is_empty() {
        return Ok(Vec::new());
    }
    value
        .split(',')
        .map(|v| parse_num(line, key, v.trim()))
        .collect()
}

// "x,y,h; x,y,h"
fn parse_points<const D: usize>(line: usize, value: &str) -> Result<Vec<[f64; D]>, ConfigError> {
    value
        .split(';')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| {
            let coords: Vec<f64> = p
                .split(',')
                .map(|c| parse_num(line, "coordinate", c.trim()))
                .collect::<Result<_, _>>()?;
            coords
                .try_into()
                .map_err(|c: Vec<f64>| ConfigError::Syntax {
                    line,
                    message: format!(
                        "expected {D} coordinates per point, found {} in '{p}'",
                        c.len()
                    ),
                })
        })
        .collect()
}

fn resolve_count<T: Clone>(
    list: &mut Vec<T>,
    base: &[T],
    count: Option<usize>,
    given: bool,
    key: &str,
) -> Result<(), ConfigError> {
    let Some(count) = count else {
        return Ok(());
    };
    if count == 0 {
        return Err(invalid(key, "must be at least 1".into()));
    }
    if given {
        if list.len() != count {
            return Err(invalid(
                key,
                format!("is {count} but {} positions were listed", list.len()),
            ));
        }
    } else if count <= base.len() {
        *list = base[..count].to_vec();
    } else {
        return Err(invalid(
            key,
            format!(
                "is {count} but only {} preset positions exist; list them explicitly",
                base.len()
            ),
        ));
    }
    Ok(())
}
