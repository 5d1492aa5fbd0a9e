use std::fs;
use std::path::Path;
use std::process::Command;

use aoristic::cli::{cmd_fit, cmd_posterior, cmd_simulate, exit_code, EXIT_CONFIG, EXIT_DATA, EXIT_VALIDATION};
use aoristic::config::RunConfig;
use aoristic::io::{ingest, parse_observed};
use aoristic::prior::Window;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_aoristic"))
}

fn config_in(dir: &Path) -> RunConfig {
    RunConfig {
        seed: Some(123),
        out: dir.to_path_buf(),
        burnin: 1_000,
        sweeps: 5_000,
        ..RunConfig::default()
    }
}

#[test]
fn simulate_then_ingest_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config_in(dir.path());
    let out = cmd_simulate(&mut cfg).unwrap();
    let back = ingest(&out.observed_path, None).unwrap();
    assert_eq!(back, out.observed);
    let truth = fs::read_to_string(&out.truth_path).unwrap();
    assert!(truth.starts_with("# seed=123\n# config={"));
    assert_eq!(truth.lines().filter(|l| !l.starts_with('#')).count(), out.truth.len() + 1);
}

#[test]
fn all_atoms_reproduce_truth() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = RunConfig { p: 1.0, ..config_in(dir.path()) };
    let out = cmd_simulate(&mut cfg).unwrap();
    assert_eq!(out.observed.k(), 0);
    assert_eq!(out.observed.atoms(), out.truth.as_slice());
}

#[test]
fn fixed_seed_gives_identical_files() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [a.path(), b.path()] {
        let run = |args: &[&str]| {
            let status = bin()
                .current_dir(dir)
                .args(["--seed", "77", "--sweeps", "2000", "--burnin", "100", "--out", "res"])
                .args(args)
                .status()
                .unwrap();
            assert!(status.success());
        };
        run(&["simulate"]);
        run(&["posterior", "res/observed.csv"]);
    }
    for name in ["truth.csv", "observed.csv", "chain.csv", "histogram.csv", "summary.json"] {
        assert_eq!(
            fs::read(a.path().join("res").join(name)).unwrap(),
            fs::read(b.path().join("res").join(name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn missing_seed_is_generated_and_echoed() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin().arg("--out").arg(dir.path()).arg("simulate").output().unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    let seed = stdout.lines().next().unwrap().strip_prefix("seed=").unwrap();
    let text = fs::read_to_string(dir.path().join("observed.csv")).unwrap();
    assert!(text.starts_with(&format!("# seed={seed}\n")));
}

#[test]
fn posterior_outputs_for_toy_data() {
    let dir = tempfile::tempdir().unwrap();
    let data = parse_observed("a,l\n0.45,0.4\n0.51,0\n0.58,0\n", Some(Window::unit())).unwrap();
    let mut cfg = RunConfig { eta: 1.2, r: 0.1, ..config_in(dir.path()) };
    let (summary, sample) = cmd_posterior(&mut cfg, &data).unwrap();
    assert_eq!((summary.n, summary.m, summary.snapshots), (3, 2, 5_000));
    assert!(summary.means[0] < 0.65);
    assert_eq!(sample.len(), 5_000);
    let hist = fs::read_to_string(dir.path().join("histogram.csv")).unwrap();
    let rows = hist.lines().filter(|l| !l.starts_with('#')).count();
    assert_eq!(rows, 1 + 50);
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(json["seed"], 123);
    assert_eq!(json["config"]["eta"], 1.2);
}

#[test]
fn posterior_with_only_atoms_writes_note() {
    let dir = tempfile::tempdir().unwrap();
    let data = parse_observed("0.2,0\n0.4,0\n", Some(Window::unit())).unwrap();
    let mut cfg = config_in(dir.path());
    let (summary, sample) = cmd_posterior(&mut cfg, &data).unwrap();
    assert!(summary.note.is_some());
    assert!(sample.is_empty());
    assert!(dir.path().join("chain.csv").exists());
}

#[test]
fn fit_reports_atom_fraction() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("toy.csv");
    fs::write(&path, "0.45,0.4\n0.51,0\n0.58,0\n").unwrap();
    let out = bin().arg("--out").arg(dir.path()).arg("fit").arg(&path).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("fit.json")).unwrap()).unwrap();
    assert_eq!(json["forward"]["p_hat"].as_f64().unwrap(), 2.0 / 3.0);
}

#[test]
fn fit_curve_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let data = parse_observed("0.45,0.4\n0.51,0\n0.58,0\n0.1,0.3\n", Some(Window::unit())).unwrap();
    let mut cfg = RunConfig {
        theta_grid: vec![-0.6, 0.0, 0.6],
        prior_samples: 500,
        ..config_in(dir.path())
    };
    let out = cmd_fit(&mut cfg, &data).unwrap();
    let curve = out.curve.unwrap();
    assert_eq!(curve.l_values[1], 0.0);
    let text = fs::read_to_string(dir.path().join("curve.csv")).unwrap();
    assert!(text.contains("eta,log_rel_lik,mc_error"));
}

#[test]
fn validate_subset_runs_only_selected() {
    let out = bin().args(["validate", "--only", "5,6"]).output().unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("[PASS] criterion 5"));
    assert!(lines[1].starts_with("[PASS] criterion 6"));
}

#[test]
fn corrupted_config_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.cfg");
    fs::write(&path, "beta = twelve\n").unwrap();
    let out = bin().arg("--config").arg(&path).args(["validate", "--only", "5"]).output().unwrap();
    assert_eq!(out.status.code(), Some(EXIT_CONFIG));
    assert_ne!(EXIT_CONFIG, EXIT_VALIDATION);
    let out = bin().args(["--set", "bogus=1", "simulate"]).output().unwrap();
    assert_eq!(out.status.code(), Some(EXIT_CONFIG));
}

#[test]
fn config_file_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.json");
    fs::write(&path, r#"{"seed": 5, "p": 1.0}"#).unwrap();
    let out = bin()
        .env("AORISTIC_CONFIG", &path)
        .arg("--out")
        .arg(dir.path())
        .arg("simulate")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("seed=5\n"));
}

#[test]
fn bad_data_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    fs::write(&path, "0.5,0\n0.5,-1\n").unwrap();
    let out = bin().arg("--out").arg(dir.path()).arg("fit").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(EXIT_DATA));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
    let missing = bin().arg("posterior").arg(dir.path().join("nope.csv")).output().unwrap();
    assert_eq!(missing.status.code(), Some(EXIT_DATA));
    assert_eq!(exit_code(&aoristic::Error::EmptyData), EXIT_DATA);
}
