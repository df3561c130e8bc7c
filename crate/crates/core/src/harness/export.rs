//! Tab-separated curve tables for plotting.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::metrics::{read_episodes, read_steps};
use super::run::{EPISODES_FILE, EVAL_STEPS_FILE};
use super::HarnessError;

pub const REWARD_CURVE_FILE: &str = "reward_curve.tsv";
pub const TS_CURVE_FILE: &str = "ts_curve.tsv";

/// Trailing mean over the last `window` values (fewer at the start).
pub fn moving_mean(values: &[f64], window: usize) -> Vec<f64> {
    let w = window.max(1);
    (0..values.len())
        .map(|i| {
            let lo = (i + 1).saturating_sub(w);
            let slice = &values[lo..=i];
            slice.iter().sum::<f64>() / slice.len() as f64
        })
        .collect()
}

/// Writes `reward_curve.tsv` (from training episodes) and `ts_curve.tsv`
/// (from evaluation steps) for whichever inputs `run_dir` holds.
pub fn export_curves(run_dir: &Path, window: usize) -> Result<Vec<PathBuf>, HarnessError> {
    let mut written = Vec::new();

    let episodes_path = run_dir.join(EPISODES_FILE);
    if episodes_path.exists() {
        let episodes = read_episodes(&episodes_path)?;
        let rewards: Vec<f64> = episodes.iter().map(|e| e.accumulated_reward).collect();
        let smooth = moving_mean(&rewards, window);
        let mut out = String::from("episode\taccumulated_reward\tmoving_mean\tslots\n");
        for (e, m) in episodes.iter().zip(smooth) {
            let _ = writeln!(
                out,
                "{}\t{:.16e}\t{:.16e}\t{}",
                e.episode, e.accumulated_reward, m, e.slots
            );
        }
        written.push(write(run_dir.join(REWARD_CURVE_FILE), &out)?);
    }

    let steps_path = run_dir.join(EVAL_STEPS_FILE);
    if steps_path.exists() {
        let steps = read_steps(&steps_path)?;
        let mut out = String::from(
            "episode\tts\tx\ty\treward\tcumulative_reward\tfairness\trate\tcumulative_sum_rate\n",
        );
        let (mut episode, mut reward, mut rate) = (usize::MAX, 0.0, 0.0);
        for s in &steps {
            if s.episode != episode {
                episode = s.episode;
                reward = 0.0;
                rate = 0.0;
            }
            reward += s.reward;
            rate += s.rate;
            let _ = writeln!(
                out,
                "{}\t{}\t{:.16e}\t{:.16e}\t{:.16e}\t{:.16e}\t{:.16e}\t{:.16e}\t{:.16e}",
                s.episode, s.ts, s.x, s.y, s.reward, reward, s.fairness, s.rate, rate
            );
        }
        written.push(write(run_dir.join(TS_CURVE_FILE), &out)?);
    }

    if written.is_empty() {
        return Err(HarnessError::MissingInput(format!(
            "{} holds neither {EPISODES_FILE} nor {EVAL_STEPS_FILE}",
            run_dir.display()
        )));
    }
    Ok(written)
}

fn write(path: PathBuf, text: &str) -> Result<PathBuf, HarnessError> {
    std::fs::write(&path, text).map_err(|e| HarnessError::io(&path, e))?;
    Ok(path)
}
