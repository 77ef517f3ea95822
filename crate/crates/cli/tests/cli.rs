use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn simplexwalk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_simplexwalk"))
        .args(args)
        .env_remove("SIMPLEXWALK_GUARD")
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn run_writes_identical_artifacts_twice() {
    let dir = tempfile::tempdir().unwrap();
    let mut bytes = Vec::new();
    for round in 0..2 {
        let out = dir.path().join(format!("r{round}"));
        let config = format!(
            r#"{{
  "scheme": {{"kind": "ngon", "n": 3}},
  "copies": 3,
  "grid": {{"t_min": 0.0, "t_max": 6.283185307179586, "steps": 120}},
  "outputs": {{
    "amplitudes": "{0}/amp.csv",
    "bmatrix": "{0}/b.json",
    "events": "{0}/events.json"
  }}
}}"#,
            out.display()
        );
        let cfg = write_config(dir.path(), &format!("c{round}.json"), &config);
        let o = simplexwalk(&["run", "--config", &cfg]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        bytes.push(
            ["amp.csv", "b.json", "events.json"]
                .map(|f| fs::read(out.join(f)).unwrap())
                .to_vec(),
        );
    }
    assert_eq!(bytes[0], bytes[1]);
    let csv = String::from_utf8(bytes[0][0].clone()).unwrap();
    assert!(csv.starts_with("t,beta,re,im,prob\n"));
    // 121 times, 10 sites each
    assert_eq!(csv.lines().count(), 1 + 121 * 10);
}

#[test]
fn unknown_config_field_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "bad.json",
        r#"{"scheme": {"kind": "ngon", "n": 3}, "copies": 2, "grid": {"t_min": 0, "t_max": 1, "steps": 2}, "colour": 1}"#,
    );
    let o = simplexwalk(&["run", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn non_hermitian_weights_exit_2() {
    let o = simplexwalk(&["walk", "bmatrix", "--scheme", "ngon", "--n", "3", "--N", "1", "--weights", "1,2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn missing_file_exits_2() {
    let o = simplexwalk(&["run", "--config", "/nonexistent/x.json"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_all_passes() {
    let o = simplexwalk(&["verify", "--suite", "all"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["passed"], true);
    assert!(report["checks"].as_array().unwrap().len() > 100);
}

#[test]
fn ngon_sweep_concentrates_at_third_turn() {
    let o = simplexwalk(&[
        "walk", "amplitudes", "--scheme", "ngon", "--n", "3", "--N", "3", "--t-min", "0", "--t-max",
        "6.283185307179586", "--steps", "600",
    ]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let target = 2.0 * PI / 3.0;
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let mut best = (f64::INFINITY, String::new(), 0.0);
    for row in reader.records() {
        let row = row.unwrap();
        let t: f64 = row[0].parse().unwrap();
        let p: f64 = row[4].parse().unwrap();
        if (t - target).abs() < 1e-12 && p > best.2 {
            best = (t, row[1].to_string(), p);
        }
    }
    // grid point 200 of 600 is exactly the third turn
    assert_eq!(best.1, "0-0-3");
    assert!((best.2 - 1.0).abs() < 1e-10);
}

#[test]
fn ow_scenario_reports_fractional_revival() {
    let o = simplexwalk(&["walk", "detect", "--scenario", "ow", "--d", "3", "--N", "5", "--k", "2"]);
    assert!(o.status.success());
    let events: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let fr = events
        .as_array()
        .unwrap()
        .iter()
        .find(|e| e["kind"] == "FR")
        .expect("an FR event");
    assert!((fr["t"].as_f64().unwrap() - PI / 2.0).abs() < 1e-6);
    for beta in fr["support"].as_array().unwrap() {
        assert_eq!(beta[2], 0, "{beta}");
        assert_eq!(beta[3], 0, "{beta}");
    }
}

#[test]
fn krawtchouk_methods_agree() {
    let mut values = Vec::new();
    for method in ["series", "genfun"] {
        let o = simplexwalk(&[
            "krawtchouk", "eval", "--kind", "ow", "--d", "2", "--N", "4", "--index", "2-1-1", "--index-tilde",
            "1-2-1", "--method", method,
        ]);
        assert!(o.status.success());
        let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        assert!(v["residual"].as_f64().unwrap() < 1e-12);
        values.push(v["value_re"].as_f64().unwrap());
    }
    assert!((values[0] - values[1]).abs() < 1e-12);
}

#[test]
fn guard_env_must_be_a_number() {
    let o = Command::new(env!("CARGO_BIN_EXE_simplexwalk"))
        .args(["scheme", "info", "--kind", "trivial2"])
        .env("SIMPLEXWALK_GUARD", "lots")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}
