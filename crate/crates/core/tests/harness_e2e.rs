use std::fs;
use std::path::Path;
use std::process::Command;

use irs_uav::harness::*;

fn tiny(algo: Algorithm, dir: &Path) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::desk();
    cfg.algorithm = algo;
    cfg.seed = 11;
    cfg.episodes = 3;
    cfg.energy.max_energy = 1500.0;
    cfg.batch_size = 8;
    cfg.dqn_hidden = vec![16];
    cfg.actor_hidden = vec![16];
    cfg.critic_hidden = vec![16];
    cfg.checkpoint_interval = 2;
    cfg.output_dir = Some(dir.to_path_buf());
    cfg
}

#[test]
fn identical_seeds_give_identical_files() {
    for algo in Algorithm::ALL {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        train(&tiny(algo, a.path())).unwrap();
        train(&tiny(algo, b.path())).unwrap();
        let mut names: Vec<_> = fs::read_dir(a.path())
            .unwrap()
            .map(|e| e.unwrap().file_name())
            .collect();
        names.sort();
        assert!(names.len() >= 4, "{names:?}");
        for name in names {
            let x = fs::read(a.path().join(&name)).unwrap();
            let y = fs::read(b.path().join(&name)).unwrap();
            assert!(x == y, "{algo}: {name:?} differs");
        }
    }
}

#[test]
fn different_seeds_differ() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    train(&tiny(Algorithm::Random, a.path())).unwrap();
    let mut cfg = tiny(Algorithm::Random, b.path());
    cfg.seed = 12;
    train(&cfg).unwrap();
    assert_ne!(
        fs::read(a.path().join(STEPS_FILE)).unwrap(),
        fs::read(b.path().join(STEPS_FILE)).unwrap()
    );
}

#[test]
fn logged_rewards_add_up_to_episode_totals() {
    let dir = tempfile::tempdir().unwrap();
    let out = train(&tiny(Algorithm::Dqn, dir.path())).unwrap();
    let episodes = read_episodes(&dir.path().join(EPISODES_FILE)).unwrap();
    let steps = read_steps(&dir.path().join(STEPS_FILE)).unwrap();
    assert_eq!(episodes, out.training.episodes);
    assert_eq!(steps, out.training.steps);
    for ep in &episodes {
        let sum: f64 = steps
            .iter()
            .filter(|s| s.episode == ep.episode)
            .map(|s| s.reward)
            .sum();
        assert_eq!(sum, ep.accumulated_reward);
    }
    assert!(dir.path().join("checkpoint_ep000002.txt").exists());
    assert!(dir.path().join(CHECKPOINT_FILE).exists());
}

#[test]
fn checkpoint_file_reproduces_the_final_evaluation() {
    for algo in [Algorithm::Dqn, Algorithm::Ddpg] {
        let dir = tempfile::tempdir().unwrap();
        let cfg = tiny(algo, dir.path());
        let out = train(&cfg).unwrap();
        let ckpt = load_checkpoint(&dir.path().join(CHECKPOINT_FILE)).unwrap();
        let mut eval_cfg = cfg.clone();
        eval_cfg.output_dir = None;
        assert_eq!(evaluate(&eval_cfg, Some(&ckpt)).unwrap(), out.evaluation);
    }
}

#[test]
fn export_writes_one_row_per_episode_and_slot() {
    let dir = tempfile::tempdir().unwrap();
    let out = train(&tiny(Algorithm::Greedy, dir.path())).unwrap();
    let files = export_curves(dir.path(), 2).unwrap();
    assert_eq!(files.len(), 2);
    let curve = fs::read_to_string(dir.path().join(REWARD_CURVE_FILE)).unwrap();
    assert_eq!(curve.lines().count(), 1 + out.training.episodes.len());
    // greedy is deterministic, so every episode and the smoothed curve agree
    for line in curve.lines().skip(1) {
        let cols: Vec<f64> = line.split('\t').map(|c| c.parse().unwrap()).collect();
        assert_eq!(cols[1], cols[2]);
    }
    let ts = fs::read_to_string(dir.path().join(TS_CURVE_FILE)).unwrap();
    assert_eq!(ts.lines().count(), 1 + out.evaluation.steps.len());
    let last: Vec<f64> = ts
        .lines()
        .last()
        .unwrap()
        .split('\t')
        .map(|c| c.parse().unwrap())
        .collect();
    assert!((last[5] - out.evaluation.episodes[0].accumulated_reward).abs() < 1e-9);
}

#[test]
fn config_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.cfg");
    fs::write(
        &path,
        "# desk run\npreset = desk\nseed = 5\nalpha_db = -20\nK = 1\n",
    )
    .unwrap();
    let cfg = ExperimentConfig::load(&path).unwrap();
    assert_eq!(cfg.seed, 5);
    assert_eq!(cfg.geometry.irs.len(), 1);
    assert!((cfg.channel.ref_path_loss - 0.01).abs() < 1e-15);
    assert!(matches!(
        ExperimentConfig::load(&dir.path().join("missing.cfg")),
        Err(HarnessError::Io { .. })
    ));
}

fn cli(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_irs-uav"))
        .args(args)
        .output()
        .unwrap()
}

#[test]
fn command_line_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let good = d.join("good.cfg");
    fs::write(
        &good,
        "preset = desk\nepisodes = 2\ne_max = 1000\nbatch_size = 4\ndqn_hidden = 8\n",
    )
    .unwrap();
    let bad = d.join("bad.cfg");
    fs::write(&bad, "K = 0\n").unwrap();
    let unknown = d.join("unknown.cfg");
    fs::write(&unknown, "warp_drive = 9\n").unwrap();
    let run = d.join("run");
    let run_s = run.to_str().unwrap();

    let ok = cli(&[
        "train",
        "--algo",
        "dqn",
        "--config",
        good.to_str().unwrap(),
        "--seed",
        "3",
        "--out",
        run_s,
    ]);
    assert_eq!(
        ok.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&ok.stderr)
    );
    assert!(run.join(EPISODES_FILE).exists());

    let e = cli(&[
        "train",
        "--algo",
        "dqn",
        "--config",
        bad.to_str().unwrap(),
        "--seed",
        "3",
        "--out",
        run_s,
    ]);
    assert_eq!(e.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&e.stderr).contains("'K'"));
    let e = cli(&[
        "train",
        "--algo",
        "dqn",
        "--config",
        unknown.to_str().unwrap(),
        "--seed",
        "3",
        "--out",
        run_s,
    ]);
    assert_eq!(e.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&e.stderr).contains("line 1"));

    let ckpt = run.join(CHECKPOINT_FILE);
    let eval_dir = d.join("eval");
    let ok = cli(&[
        "eval",
        "--config",
        good.to_str().unwrap(),
        "--checkpoint",
        ckpt.to_str().unwrap(),
        "--out",
        eval_dir.to_str().unwrap(),
    ]);
    assert_eq!(
        ok.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&ok.stderr)
    );
    assert!(eval_dir.join(EVAL_STEPS_FILE).exists());

    // the checkpoint's hidden width no longer matches
    let wider = d.join("wider.cfg");
    fs::write(&wider, "preset = desk\ndqn_hidden = 32\n").unwrap();
    let e = cli(&[
        "eval",
        "--config",
        wider.to_str().unwrap(),
        "--checkpoint",
        ckpt.to_str().unwrap(),
        "--out",
        eval_dir.to_str().unwrap(),
    ]);
    assert_eq!(e.status.code(), Some(2));

    let ok = cli(&["export", "--run", run_s]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(run.join(REWARD_CURVE_FILE).exists() && run.join(TS_CURVE_FILE).exists());
    let e = cli(&["export", "--run", d.join("nowhere").to_str().unwrap()]);
    assert_eq!(e.status.code(), Some(2));
}

#[test]
fn random_policy_loses_reward_at_full_scale() {
    let mut cfg = ExperimentConfig::table2();
    cfg.algorithm = Algorithm::Random;
    let rewards: Vec<f64> = (1..=20)
        .map(|seed| {
            cfg.seed = seed;
            evaluate(&cfg, None).unwrap().episodes[0].accumulated_reward
        })
        .collect();
    let mean = rewards.iter().sum::<f64>() / rewards.len() as f64;
    assert!(mean < 0.0, "{rewards:?}");
}
