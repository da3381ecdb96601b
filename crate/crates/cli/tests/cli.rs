use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .to_str()
        .unwrap()
        .to_string()
}

fn polaris(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polaris"))
        .args(args)
        .env_remove("POLARIS_SEED")
        .output()
        .unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn entry<'a>(report: &'a Value, name: &str) -> &'a Value {
    report["entries"]
        .as_array()
        .unwrap()
        .iter()
        .find(|e| e["name"] == name)
        .unwrap_or_else(|| panic!("no entry {name}"))
}

#[test]
fn field_and_bracket_of_worked_pair() {
    let f = fixture("worked.json");
    let out = polaris(&["--json", "field", &f, "H"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(
        entry(&r, "field:H")["data"]["components"],
        serde_json::json!(["-x", "-y", "z"])
    );

    let r = json(&polaris(&["--json", "bracket", &f, "H", "K"]));
    assert_eq!(
        entry(&r, "bracket:H,K")["data"]["components"],
        serde_json::json!(["x", "y"])
    );
}

#[test]
fn nambu_field_on_three_space() {
    let r = json(&polaris(&["--json", "nambu", &fixture("worked.json"), "H"]));
    let e = &r["entries"][0];
    assert_eq!(e["data"]["components"], serde_json::json!(["-x*z", "-y*z", "z^2"]));
}

#[test]
fn verify_worked_passes() {
    let out = polaris(&["verify", &fixture("worked.json"), "--trials", "5"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("command: verify\nseed: 42\n"));
    assert!(text.contains("summary: "));
    assert!(text.contains(" 0 failed"));
}

#[test]
fn verify_detects_perturbed_tensor() {
    let out = polaris(&["--json", "verify", &fixture("perturbed.json")]);
    assert_eq!(out.status.code(), Some(1));
    let r = json(&out);
    let failing: Vec<&Value> = r["entries"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|e| e["status"] == "fail")
        .collect();
    assert!(!failing.is_empty());
    assert!(failing.iter().all(|e| e["residual"] != "0"));
}

#[test]
fn verify_without_maps_checks_structure_only() {
    let out = polaris(&["--json", "verify", &fixture("empty.json")]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["chart"]["n"], 2);
    assert_eq!(r["chart"]["k"], 3);
    assert!(r["entries"].as_array().unwrap().iter().all(|e| e["status"] != "fail"));
}

#[test]
fn verify_nambu_and_classical_fixtures() {
    for name in ["nambu_r3n.json", "nambu_rk1.json", "classical.json"] {
        let out = polaris(&["verify", &fixture(name), "--trials", "5"]);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{name}: {}",
            String::from_utf8_lossy(&out.stdout)
        );
    }
}

#[test]
fn repeat_runs_are_byte_identical() {
    let f = fixture("worked.json");
    let args = ["--json", "verify", f.as_str(), "--seed", "11", "--trials", "10"];
    let a = polaris(&args);
    let b = polaris(&args);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["seed"], 11);
}

#[test]
fn seed_precedence() {
    let f = fixture("worked.json");
    let base = json(&polaris(&["--json", "validate", &f]));
    assert_eq!(base["seed"], 42);

    let env = Command::new(env!("CARGO_BIN_EXE_polaris"))
        .args(["--json", "validate", &f])
        .env("POLARIS_SEED", "9")
        .output()
        .unwrap();
    assert_eq!(json(&env)["seed"], 9);

    let flag = Command::new(env!("CARGO_BIN_EXE_polaris"))
        .args(["--json", "--seed", "3", "validate", &f])
        .env("POLARIS_SEED", "9")
        .output()
        .unwrap();
    assert_eq!(json(&flag)["seed"], 3);
}

#[test]
fn validate_reports_unpolarized_maps_as_info() {
    let out = polaris(&["--json", "validate", &fixture("not_polarized.json")]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(entry(&r, "polarized:A")["status"], "info");
    assert_eq!(entry(&r, "polarized:B")["status"], "info");
    assert_eq!(entry(&r, "polarized:H")["status"], "pass");
}

#[test]
fn input_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("bad_json.json", "{ not json"),
        ("zero_k.json", r#"{"n": 1, "k": 0}"#),
        ("huge.json", r#"{"n": 40, "k": 40}"#),
        ("unknown_var.json", r#"{"n": 1, "k": 1, "hamiltonians": {"H": ["w"]}}"#),
        ("bad_expr.json", r#"{"n": 1, "k": 1, "hamiltonians": {"H": ["(x1_1"]}}"#),
        ("unknown_key.json", r#"{"n": 1, "k": 1, "extra": 3}"#),
    ];
    for (name, text) in cases {
        let path = dir.path().join(name);
        std::fs::write(&path, text).unwrap();
        let out = polaris(&["validate", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(2), "{name}");
        let err = String::from_utf8(out.stderr).unwrap();
        assert!(err.starts_with("error: "), "{name}: {err}");
        assert!(!err.contains("panicked"), "{name}: {err}");
    }

    let out = polaris(&["validate", &fixture("bad_count.json")]);
    assert_eq!(out.status.code(), Some(2));
    let out = polaris(&["validate", "/nonexistent/problem.json"]);
    assert_eq!(out.status.code(), Some(2));
    let out = polaris(&["field", &fixture("worked.json"), "Nope"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn integrate_writes_csv_and_checks_drift() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("traj.csv");
    let out = polaris(&[
        "--json",
        "integrate",
        &fixture("worked.json"),
        "H",
        "--tol",
        "1e-9",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));

    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,x,y,z"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 1001);
    let last = rows.last().unwrap();
    assert_eq!(last[0], 1.0);
    let e = std::f64::consts::E;
    assert!((last[1] - 1.0 / e).abs() < 1e-10);
    assert!((last[2] - 1.0 / e).abs() < 1e-10);
    assert!((last[3] - e).abs() < 1e-10);
}

#[test]
fn integrate_nambu_flow_exceeds_tight_bound() {
    let out = polaris(&[
        "integrate",
        &fixture("worked.json"),
        "H",
        "--flow",
        "nambu",
        "--tol",
        "1e-8",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn integrate_rejects_nonpositive_step() {
    for h in ["0", "-1"] {
        let out = polaris(&["integrate", &fixture("worked.json"), "H", "--h", h]);
        assert_eq!(out.status.code(), Some(2), "h = {h}");
    }
}
