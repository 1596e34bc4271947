use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hydromag")).args(args).output().unwrap()
}

fn stdout(args: &[&str]) -> String {
    let o = run(args);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&stdout(args)).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn classify_examples() {
    assert_eq!(stdout(&["classify", "--m", "2", "--energy", "3.0"]), "case 1\n");
    assert_eq!(stdout(&["classify", "--m", "-1", "--energy", "1.0"]), "case 5\n");
    assert_eq!(stdout(&["classify", "--m", "0", "--energy", "5.0"]), "case 3\n");
    let v = json(&["classify", "--m", "0", "--energy", "-2", "--format", "json"]);
    assert_eq!(v["case"], 1);
}

#[test]
fn solve_terminating_state() {
    let v = json(&["solve", "--a", "1", "--m", "0", "--case", "3", "--k", "2"]);
    let r = &v[0];
    assert_eq!(r["gamma"].as_f64().unwrap(), 1.0);
    assert_eq!(r["curlyE"].as_f64().unwrap(), 2.0);
    assert!(r["residual"].as_f64().unwrap() < 1e-12);
    assert_eq!(r["truncation_N"], 1);
    assert_eq!(r["integrable"], true);
    assert_eq!(r["warnings"].as_array().unwrap().len(), 0);
}

#[test]
fn solve_first_level() {
    let v = json(&["solve", "--a", "2", "--m", "1", "--case", "1", "--k", "1"]);
    assert!((v[0]["gamma"].as_f64().unwrap() - 2.0 / 3.0).abs() < 1e-15);
    assert!((v[0]["curlyE"].as_f64().unwrap() - (3.0 - 4.0 / 9.0)).abs() < 1e-14);
}

#[test]
fn solve_cubic_level() {
    let v = json(&["solve", "--a", "1", "--m", "0", "--case", "1", "--k", "3"]);
    let g = v[0]["gamma"].as_f64().unwrap();
    assert!((15.0 * g * g * g - 23.0 * g * g + 9.0 * g - 5.0).abs() < 1e-12);
}

#[test]
fn solve_auto_covers_both_families() {
    let v = json(&["solve", "--a", "1", "--m", "0", "--k", "2"]);
    let cases: Vec<u64> = v.as_array().unwrap().iter().map(|r| r["case"].as_u64().unwrap()).collect();
    assert!(cases.contains(&1) && cases.contains(&3), "{cases:?}");
}

#[test]
fn physical_input_mode() {
    let v = json(&["solve", "--z", "1", "--b", "1", "--mu", "9.1093837015e-31", "--m", "0", "--case", "1", "--k", "1"]);
    let r = &v[0];
    assert!((r["a"].as_f64().unwrap() - 969.64).abs() < 0.01);
    // Landau ground lies above the deep Coulomb level; E is then close to -1 Ry * 4.
    let joule = r["E_joule"].as_f64().unwrap();
    assert!((joule / -8.719e-18 - 1.0).abs() < 1e-3, "{joule}");
    assert!(r["eps"].as_f64().is_some());
}

#[test]
fn spectrum_cardinality_and_flags() {
    let text = stdout(&[
        "spectrum", "--a", "1", "--m-min", "0", "--m-max", "2", "--k-min", "1", "--k-max", "4", "--case", "1", "--format", "csv",
    ]);
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 13);
    assert_eq!(rows[0][0], "case");

    let all = stdout(&[
        "spectrum", "--a", "1", "--m-min", "0", "--m-max", "2", "--k-max", "4", "--case", "1", "--all-branches",
    ]);
    let v: Value = serde_json::from_str(&all).unwrap();
    assert!(v.as_array().unwrap().len() > 12);

    let v = json(&["spectrum", "--a", "1", "--m-min", "0", "--m-max", "0", "--k-min", "10", "--k-max", "10", "--case", "3"]);
    let notes = v[0]["notes"].as_array().unwrap();
    assert!(notes.iter().any(|n| n == "numeric-only root (degree 5)"), "{notes:?}");

    let v = json(&["spectrum", "--a", "6", "--m-min", "-3", "--m-max", "-3", "--k-max", "3", "--case", "4"]);
    for r in v.as_array().unwrap() {
        assert!(!r["warnings"].as_array().unwrap().is_empty());
    }
}

#[test]
fn spectrum_failures_are_rows() {
    let v = json(&["spectrum", "--a", "1", "--m-min", "0", "--m-max", "0", "--k-min", "1", "--k-max", "2", "--case", "3"]);
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows[0]["error"].is_string());
    assert!(rows[1]["error"].is_null());
}

#[test]
fn wavefunction_examples() {
    let text = stdout(&["wavefunction", "--a", "1", "--m", "0", "--case", "3", "--k", "2", "--xmax", "2", "--points", "5"]);
    let rows = csv_rows(&text);
    assert_eq!(rows[0], ["x", "R", "u", "normalized"]);
    let node = rows.iter().find(|r| r[0] == "1.0000000000000000e0").unwrap();
    assert_eq!(node[1].parse::<f64>().unwrap(), 0.0);

    let text = stdout(&["wavefunction", "--a", "0", "--m", "0", "--case", "2", "--points", "9"]);
    for r in csv_rows(&text).iter().skip(1) {
        let x: f64 = r[0].parse().unwrap();
        let v: f64 = r[1].parse().unwrap();
        assert!((v - (-x * x / 4.0).exp()).abs() < 1e-15);
    }

    let text = stdout(&["wavefunction", "--a", "1", "--m", "-1", "--case", "5", "--points", "4"]);
    assert_eq!(csv_rows(&text).len(), 5);

    let text = stdout(&["wavefunction", "--a", "0", "--m", "0", "--case", "2", "--points", "3", "--normalize"]);
    assert!(text.lines().nth(1).unwrap().ends_with("true"));
}

#[test]
fn verify_reports() {
    let v = json(&["verify", "--a", "1", "--m", "0", "--k-max", "3"]);
    let terminating = v["states"]
        .as_array()
        .unwrap()
        .iter()
        .find(|s| s["case"] == 3 && s["k"] == 2)
        .unwrap();
    assert!(terminating["fd_distance"].as_f64().unwrap() < 1e-4);
    assert_eq!(terminating["fd_match"], true);

    let v = json(&["verify", "--a", "0", "--m", "1"]);
    let landau = v["landau"].as_array().unwrap();
    assert_eq!(landau.len(), 3);
    assert!(landau.iter().all(|l| l["pass"] == true));
    assert!(v["orthogonality"]["matrix"].is_array());
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| run(args).status.code().unwrap();
    assert_eq!(code(&["--help"]), 0);
    assert_eq!(code(&["--version"]), 0);
    assert_eq!(code(&["nonsense"]), 1);
    assert_eq!(code(&["solve", "--m", "0", "--k", "1"]), 1);
    assert_eq!(code(&["solve", "--a", "1", "--z", "1", "--m", "0", "--k", "1"]), 1);
    assert_eq!(code(&["solve", "--a", "1", "--m", "-1", "--case", "1", "--k", "1"]), 1);
    assert_eq!(code(&["solve", "--a", "1", "--m", "0", "--case", "7", "--k", "1"]), 1);
    assert_eq!(code(&["wavefunction", "--a", "1", "--m", "0", "--case", "1", "--k", "1", "--branch", "5"]), 2);
}

#[test]
fn no_admissible_root_exit() {
    // The only root of level 3 is gamma = 1, which already zeroes a_2.
    let o = run(&["solve", "--a", "1", "--m", "0", "--case", "3", "--k", "3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("no admissible root"));
}

#[test]
fn config_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# constants\nhbar = 1.054571817e-34\ntol_trunc = 1e-10\nresidual_points = 50\n").unwrap();
    let out = dir.path().join("rec.json");
    let o = run(&[
        "solve", "--a", "1", "--m", "0", "--case", "3", "--k", "2", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let v: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v[0]["tol_trunc"].as_f64().unwrap(), 1e-10);

    fs::write(&cfg, "colour = blue\n").unwrap();
    assert_eq!(run(&["solve", "--a", "1", "--m", "0", "--case", "3", "--k", "2", "--config", cfg.to_str().unwrap()]).status.code(), Some(1));
    fs::write(&cfg, "hbar = -1\n").unwrap();
    assert_eq!(run(&["solve", "--a", "1", "--m", "0", "--case", "3", "--k", "2", "--config", cfg.to_str().unwrap()]).status.code(), Some(1));
}
