use std::fs;
use std::path::Path;
use std::process::Command;

use bridgesim::experiment::TIMESERIES_HEADER;
use bridgesim::sweep::SWEEP_HEADER;
use bridgesim::{run_experiment, run_sweep, run_verify, ExperimentConfig, Limits, Suite, SweepGrid};

fn small() -> ExperimentConfig {
    let mut c = ExperimentConfig::new(6, 4, 8, 1.0, 1.0, 100_000);
    c.seed = 7;
    c.sample_every = 10;
    c
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bridgesim"))
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|x| x.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

#[test]
fn experiment_writes_its_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small();
    let s = run_experiment(&cfg, dir.path()).unwrap();
    let (header, rows) = read_csv(&dir.path().join("timeseries.csv"));
    assert_eq!(header, TIMESERIES_HEADER);
    assert_eq!(rows.len() as u64, (cfg.steps - cfg.burn_in()) / cfg.sample_every);
    assert_eq!(s.samples, rows.len() as u64);
    assert_eq!(rows[0][0], "50010");
    let nb = rows.iter().filter(|r| r[5] == "1").count() as f64 / rows.len() as f64;
    assert!((nb - s.nb_fraction).abs() < 1e-12);

    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    for key in ["nb_fraction", "mb_fraction", "mean_H", "seed", "thresholds"] {
        assert!(summary.get(key).is_some(), "{key}");
    }
    assert_eq!(summary["seed"], 7);
    assert_eq!(summary["thresholds"]["rho"], 0.5);
    let ascii = fs::read_to_string(dir.path().join("snapshots/final.txt")).unwrap();
    assert_eq!(ascii.lines().count(), 4);
    let svg = fs::read_to_string(dir.path().join("snapshots/final.svg")).unwrap();
    assert_eq!(svg.matches("<circle").count(), 24);
}

#[test]
fn identical_seeds_give_identical_series() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    run_experiment(&small(), a.path()).unwrap();
    run_experiment(&small(), b.path()).unwrap();
    let read = |d: &Path| fs::read(d.join("timeseries.csv")).unwrap();
    assert_eq!(read(a.path()), read(b.path()));
    let mut other = small();
    other.seed = 8;
    let c = tempfile::tempdir().unwrap();
    run_experiment(&other, c.path()).unwrap();
    assert_ne!(read(a.path()), read(c.path()));
}

#[test]
fn bad_configs_are_rejected() {
    let mut c = small();
    c.epsilon = 0.2;
    assert_eq!(c.validate().unwrap_err().exit_code(), 1);
    let mut c = small();
    c.rho = Some(0.5);
    assert!(c.validate().is_err());
    let mut c = small();
    c.burn_in = Some(c.steps + 1);
    assert!(c.validate().is_err());
    let json = r#"{"width": 6, "height": 4, "rho": 0.5, "beta": 1, "eta": 1, "steps": 10}"#;
    let c: ExperimentConfig = serde_json::from_str(json).unwrap();
    assert_eq!(c.params().unwrap().cap_n(), 8);
    assert_eq!(c.epsilon, 0.3);
    assert!(serde_json::from_str::<ExperimentConfig>(
        r#"{"width": 6, "height": 4, "beta": 1, "eta": 1, "steps": 10, "bogus": 1}"#
    )
    .is_err());
}

#[test]
fn single_cell_sweep_matches_the_experiment() {
    let dir = tempfile::tempdir().unwrap();
    let base = small();
    let grid = SweepGrid {
        beta_values: vec![base.beta],
        eta_values: vec![base.eta],
        replicas: 1,
        base: base.clone(),
    };
    let rows = run_sweep(&grid, &dir.path().join("sweep.csv")).unwrap();
    let s = run_experiment(&base, &dir.path().join("run")).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].nb_fraction, s.nb_fraction);
    assert_eq!(rows[0].mb_fraction, s.mb_fraction);
    assert_eq!(rows[0].mean_bridge_count, s.mean_bridge_count);
    assert_eq!(rows[0].mean_h, s.mean_h);
    let (header, _) = read_csv(&dir.path().join("sweep.csv"));
    assert_eq!(header, SWEEP_HEADER);
}

#[test]
fn sweeps_are_deterministic_and_resume() {
    let dir = tempfile::tempdir().unwrap();
    let mut base = small();
    base.steps = 20_000;
    let grid = SweepGrid {
        beta_values: vec![0.5, 2.0],
        eta_values: vec![0.0, 4.0],
        replicas: 2,
        base,
    };
    let path = dir.path().join("sweep.csv");
    let full = run_sweep(&grid, &path).unwrap();
    assert_eq!(full.len(), 8);
    let bytes = fs::read(&path).unwrap();
    // replicas of a cell draw different streams
    assert_ne!(full[0].mean_h, full[1].mean_h);

    // keep three finished rows and a torn fourth line
    let text = String::from_utf8(bytes.clone()).unwrap();
    let mut lines: Vec<&str> = text.lines().take(4).collect();
    let torn = &text.lines().nth(4).unwrap()[..5];
    lines.push(torn);
    fs::write(&path, lines.join("\n")).unwrap();
    let resumed = run_sweep(&grid, &path).unwrap();
    assert_eq!(resumed, full);
    assert_eq!(fs::read(&path).unwrap(), bytes);

    let mut empty = grid.clone();
    empty.eta_values.clear();
    assert!(run_sweep(&empty, &path).is_err());
}

#[test]
fn verify_reports_in_both_forms() {
    let r = run_verify(Suite::Counting, &Limits::default()).unwrap();
    assert!(r.pass);
    assert!(r.human().contains("PASS Counting/census_3x2"));
    let json = serde_json::to_value(&r).unwrap();
    assert_eq!(json["pass"], true);
    assert_eq!(json["checks"][0]["name"], "census_3x2");

    let r = run_verify(Suite::Gibbs, &Limits::default()).unwrap();
    let probe = r.check("literal_vs_gibbs").unwrap();
    assert!(probe.informational);
    assert_eq!(probe.metrics["stationary"], 0.0);
}

#[test]
fn binary_exit_codes() {
    let out = bin().args(["verify", "counting", "--json"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["suite"], "counting");

    let out = bin().args(["simulate", "--width", "6"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let out = bin().args(["simulate", "--no-such-flag"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let out = bin().args(["--help"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));

    // an impossible limit makes the gibbs suite error out as a configuration problem
    let out = bin()
        .args(["verify", "gibbs"])
        .env("BRIDGESIM_MAX_STATES", "10")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn binary_simulate_enumerate_render() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("exp.json");
    fs::write(
        &cfg_path,
        r#"{"width": 4, "height": 3, "n": 6, "beta": 1.0, "eta": 1.0, "steps": 1000, "seed": 3, "epsilon": 0.34}"#,
    )
    .unwrap();
    let out_dir = dir.path().join("run");
    let st = bin()
        .args(["simulate", "--config"])
        .arg(&cfg_path)
        .args(["--steps", "2000", "--sample-every", "10", "--out"])
        .arg(&out_dir)
        .status()
        .unwrap();
    assert!(st.success());
    let (_, rows) = read_csv(&out_dir.join("timeseries.csv"));
    assert_eq!(rows.len(), 100);

    let enum_path = dir.path().join("states.csv");
    let st = bin()
        .args([
            "enumerate",
            "--width",
            "3",
            "--height",
            "2",
            "--n",
            "1",
            "--beta",
            "1",
            "--eta",
            "1",
            "--out",
        ])
        .arg(&enum_path)
        .status()
        .unwrap();
    assert!(st.success());
    let (header, rows) = read_csv(&enum_path);
    assert_eq!(header, ["index", "mask", "B", "S", "H", "pi"]);
    assert_eq!(rows.len(), 4);
    let total: f64 = rows.iter().map(|r| r[5].parse::<f64>().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-12);
    assert_eq!(rows[0][2], "0");
    assert_eq!(rows[1][2], "4");

    let svg = bin()
        .arg("render")
        .arg(out_dir.join("snapshots/final.txt"))
        .output()
        .unwrap();
    assert!(svg.status.success());
    assert_eq!(
        String::from_utf8(svg.stdout).unwrap(),
        fs::read_to_string(out_dir.join("snapshots/final.svg")).unwrap()
    );
}

#[test]
fn violations_exit_with_three() {
    let e = bridgesim::CliError::Core(bridgesim_core::Error::InvariantViolation {
        step: 5,
        reason: "x".into(),
        dump: String::new(),
    });
    assert_eq!(e.exit_code(), 3);
    assert_eq!(bridgesim::CliError::Verification("x".into()).exit_code(), 2);
}
