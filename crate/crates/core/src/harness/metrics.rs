//! CSV metrics. Each file starts with a `# irs-uav-metrics vN <kind>` line,
//! then a fixed column header. Floats are written with 17 significant digits.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use super::run::{EpisodeSummary, RunMetrics, StepRecord};
use super::HarnessError;

pub const METRICS_VERSION: u32 = 1;

pub const EPISODE_COLUMNS: [&str; 7] = [
    "episode",
    "slots",
    "accumulated_reward",
    "final_fairness",
    "sum_rate",
    "out_of_bounds",
    "mean_loss",
];

pub const STEP_COLUMNS: [&str; 10] = [
    "episode",
    "ts",
    "x",
    "y",
    "energy",
    "served_ue",
    "rate",
    "fairness",
    "reward",
    "out_of_bounds",
];

fn f(v: f64) -> String {
    format!("{v:.16e}")
}

/// Appends episode and step rows to a pair of CSV files, flushing after
/// every episode.
pub struct MetricsWriter {
    episodes: BufWriter<File>,
    steps: BufWriter<File>,
    episodes_path: PathBuf,
    steps_path: PathBuf,
}

impl MetricsWriter {
    pub fn create(episodes_path: &Path, steps_path: &Path) -> Result<Self, HarnessError> {
        let open = |p: &Path| {
            File::create(p)
                .map(BufWriter::new)
                .map_err(|e| HarnessError::io(p, e))
        };
        let mut w = Self {
            episodes: open(episodes_path)?,
            steps: open(steps_path)?,
            episodes_path: episodes_path.to_path_buf(),
            steps_path: steps_path.to_path_buf(),
        };
        let (ep, st) = (
            format!(
                "# irs-uav-metrics v{METRICS_VERSION} episodes\n{}\n",
                EPISODE_COLUMNS.join(",")
            ),
            format!(
                "# irs-uav-metrics v{METRICS_VERSION} steps\n{}\n",
                STEP_COLUMNS.join(",")
            ),
        );
        w.episodes
            .write_all(ep.as_bytes())
            .map_err(|e| HarnessError::io(&w.episodes_path, e))?;
        w.steps
            .write_all(st.as_bytes())
            .map_err(|e| HarnessError::io(&w.steps_path, e))?;
        Ok(w)
    }

    pub fn write_episode(
        &mut self,
        summary: &EpisodeSummary,
        steps: &[StepRecord],
    ) -> Result<(), HarnessError> {
        let mut block = String::new();
        for s in steps {
            block.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                s.episode,
                s.ts,
                f(s.x),
                f(s.y),
                f(s.energy),
                s.served_ue,
                f(s.rate),
                f(s.fairness),
                f(s.reward),
                u8::from(s.out_of_bounds)
            ));
        }
        self.steps
            .write_all(block.as_bytes())
            .and_then(|_| self.steps.flush())
            .map_err(|e| HarnessError::io(&self.steps_path, e))?;
        let row = format!(
            "{},{},{},{},{},{},{}\n",
            summary.episode,
            summary.slots,
            f(summary.accumulated_reward),
            f(summary.final_fairness),
            f(summary.sum_rate),
            summary.out_of_bounds,
            summary.mean_loss.map(f).unwrap_or_default()
        );
        self.episodes
            .write_all(row.as_bytes())
            .and_then(|_| self.episodes.flush())
            .map_err(|e| HarnessError::io(&self.episodes_path, e))
    }
}

/// Writes a whole run at once.
pub fn write_metrics(
    metrics: &RunMetrics,
    episodes_path: &Path,
    steps_path: &Path,
) -> Result<(), HarnessError> {
    let mut w = MetricsWriter::create(episodes_path, steps_path)?;
    let mut rest = metrics.steps.as_slice();
    for ep in &metrics.episodes {
        let n = rest.iter().take_while(|s| s.episode == ep.episode).count();
        w.write_episode(ep, &rest[..n])?;
        rest = &rest[n..];
    }
    Ok(())
}

struct Table {
    path: PathBuf,
    rows: Vec<(usize, Vec<String>)>,
}

fn read_table(path: &Path, columns: &[&str]) -> Result<Table, HarnessError> {
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    let err = |line: usize, message: String| HarnessError::Metrics {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.starts_with('#') && !l.trim().is_empty());
    let expected = columns.join(",");
    match lines.next() {
        Some((_, h)) if h == expected => {}
        Some((i, h)) => return Err(err(i + 1, format!("unexpected header '{h}'"))),
        None => return Err(err(0, "no header row".into())),
    }
    let mut rows = Vec::new();
    for (i, l) in lines {
        let cells: Vec<String> = l.split(',').map(str::to_string).collect();
        if cells.len() != columns.len() {
            return Err(err(
                i + 1,
                format!("expected {} columns, found {}", columns.len(), cells.len()),
            ));
        }
        rows.push((i + 1, cells));
    }
    Ok(Table {
        path: path.to_path_buf(),
        rows,
    })
}

impl Table {
    fn parse<T: std::str::FromStr>(&self, line: usize, cell: &str) -> Result<T, HarnessError> {
        cell.parse().map_err(|_| HarnessError::Metrics {
            path: self.path.clone(),
            line,
            message: format!("bad value '{cell}'"),
        })
    }
}

pub fn read_episodes(path: &Path) -> Result<Vec<EpisodeSummary>, HarnessError> {
    let t = read_table(path, &EPISODE_COLUMNS)?;
    t.rows
        .iter()
        .map(|(line, c)| {
            Ok(EpisodeSummary {
                episode: t.parse(*line, &c[0])?,
                slots: t.parse(*line, &c[1])?,
                accumulated_reward: t.parse(*line, &c[2])?,
                final_fairness: t.parse(*line, &c[3])?,
                sum_rate: t.parse(*line, &c[4])?,
                out_of_bounds: t.parse(*line, &c[5])?,
                mean_loss: if c[6].is_empty() {
                    None
                } else {
                    Some(t.parse(*line, &c[6])?)
                },
            })
        })
        .collect()
}

pub fn read_steps(path: &Path) -> Result<Vec<StepRecord>, HarnessError> {
    let t = read_table(path, &STEP_COLUMNS)?;
    t.rows
        .iter()
        .map(|(line, c)| {
            Ok(StepRecord {
                episode: t.parse(*line, &c[0])?,
                ts: t.parse(*line, &c[1])?,
                x: t.parse(*line, &c[2])?,
                y: t.parse(*line, &c[3])?,
                energy: t.parse(*line, &c[4])?,
                served_ue: t.parse(*line, &c[5])?,
                rate: t.parse(*line, &c[6])?,
                fairness: t.parse(*line, &c[7])?,
                reward: t.parse(*line, &c[8])?,
                out_of_bounds: t.parse::<u8>(*line, &c[9])? != 0,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> RunMetrics {
        let steps = vec![
            StepRecord {
                episode: 0,
                ts: 1,
                x: 1.0 / 3.0,
                y: 2.0,
                energy: 10.0,
                served_ue: 1,
                rate: 0.1,
                fairness: 1.0,
                reward: -99.7,
                out_of_bounds: true,
            },
            StepRecord {
                episode: 0,
                ts: 2,
                x: 1.0,
                y: 2.0,
                energy: -1.0,
                served_ue: 0,
                rate: 1e-20,
                fairness: 0.5,
                reward: 0.5,
                out_of_bounds: false,
            },
            StepRecord {
                episode: 1,
                ts: 1,
                x: 0.0,
                y: 0.0,
                energy: -3.0,
                served_ue: 2,
                rate: 2.0,
                fairness: 1.0,
                reward: 1.2,
                out_of_bounds: false,
            },
        ];
        let episodes = vec![
            EpisodeSummary {
                episode: 0,
                slots: 2,
                accumulated_reward: -99.2,
                final_fairness: 0.5,
                sum_rate: 0.1,
                out_of_bounds: 1,
                mean_loss: None,
            },
            EpisodeSummary {
                episode: 1,
                slots: 1,
                accumulated_reward: 1.2,
                final_fairness: 1.0,
                sum_rate: 2.0,
                out_of_bounds: 0,
                mean_loss: Some(0.25),
            },
        ];
        RunMetrics { episodes, steps }
    }

    #[test]
    fn csv_round_trips_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let (e, s) = (dir.path().join("e.csv"), dir.path().join("s.csv"));
        let m = sample();
        write_metrics(&m, &e, &s).unwrap();
        assert_eq!(read_episodes(&e).unwrap(), m.episodes);
        assert_eq!(read_steps(&s).unwrap(), m.steps);
        let text = std::fs::read_to_string(&s).unwrap();
        assert!(text.starts_with("# irs-uav-metrics v1 steps\nepisode,ts,x,y,"));
        assert!(text.contains("3.3333333333333331e-1"));
    }

    #[test]
    fn wrong_header_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.csv");
        std::fs::write(&p, "a,b\n1,2\n").unwrap();
        assert!(matches!(
            read_episodes(&p),
            Err(HarnessError::Metrics { line: 1, .. })
        ));
        assert!(matches!(
            read_steps(&dir.path().join("none.csv")),
            Err(HarnessError::Io { .. })
        ));
    }
}
