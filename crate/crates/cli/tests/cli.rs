use std::path::PathBuf;
use std::process::{Command, Output};

fn models() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../models")
}

fn hyinv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hyinv"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn model(name: &str) -> String {
    models().join(name).to_string_lossy().into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn ball_invariants() {
    let o = hyinv(&["invariants", &model("bouncing_ball.model"), "--real"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    for g in ["w - 1", "vx - c", "t*c - x", "vy^2 + 2*y*g - 2*g*h"] {
        assert!(s.lines().any(|l| l.trim() == g), "{g} missing in\n{s}");
    }
}

#[test]
fn rotation_closure() {
    let o = hyinv(&["closure-exp", &model("rotation.mat"), "--real"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    for g in ["x_1_2 + x_2_1", "x_1_1 - x_2_2", "x_2_1^2 + x_2_2^2 - 1"] {
        assert!(s.lines().any(|l| l.trim() == g), "{g} missing in\n{s}");
    }
    let o = hyinv(&[
        "--format",
        "machine",
        "closure-exp",
        &model("rotation.mat"),
        "--complex",
    ]);
    assert!(stdout(&o).contains("\"field\""));
}

#[test]
fn errors_exit_one_and_name_the_stage() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.model");
    std::fs::write(&empty, r#"{ "variables": ["x"], "locations": [] }"#).unwrap();
    let o = hyinv(&["invariants", empty.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("parse stage") && err.contains("locations"), "{err}");
    let o = hyinv(&["invariants", dir.path().join("missing.model").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    std::fs::write(&empty, "{\n  \"variables\": [\"x\"],\n  oops\n}").unwrap();
    let o = hyinv(&["invariants", empty.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
}

#[test]
fn unconverged_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("grow.model");
    std::fs::write(
        &p,
        r#"{ "variables": ["x"], "locations": [{ "name": "a", "flow": [["0"]], "initial": ["x - 1"] }],
             "edges": [{ "from": "a", "to": "a", "reset": [["-2"]] }] }"#,
    )
    .unwrap();
    let o = hyinv(&["invariants", p.to_str().unwrap(), "--max-rounds", "3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("NOT converged"));
}

#[test]
fn machine_output_checks_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["bouncing_ball.model", "rc.model", "switching_rotations.model"] {
        let a = hyinv(&["--format", "machine", "invariants", &model(name)]);
        let b = hyinv(&["--format", "machine", "invariants", &model(name)]);
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(a.stdout, b.stdout, "{name}");
        let cand = dir.path().join(format!("{name}.json"));
        std::fs::write(&cand, &a.stdout).unwrap();
        let o = hyinv(&["check", &model(name), "--candidate", cand.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
        assert!(stdout(&o).starts_with("PASS"));
    }
}

#[test]
fn bad_candidate_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cand = dir.path().join("bad.json");
    std::fs::write(
        &cand,
        r#"{ "variables": ["t", "x", "y", "vx", "vy", "c", "g", "h", "w"],
             "locations": [{ "name": "fall", "ideal": ["vy"] }] }"#,
    )
    .unwrap();
    let o = hyinv(&[
        "--format",
        "machine",
        "check",
        &model("bouncing_ball.model"),
        "--candidate",
        cand.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["passed"], false);
    let viol = v["violations"].as_array().unwrap();
    assert!(viol
        .iter()
        .any(|x| x["kind"] == "flow" && x["location"] == "fall" && x["generator"] == "vy"));
}

#[test]
fn semigroup_and_dimension() {
    let o = hyinv(&["semigroup", &model("hyperbolic.mat"), &model("rotation.mat")]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("dimension 3"));
    assert!(s.contains("x_1_2*x_2_1 - x_1_1*x_2_2 + 1"));
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("i.json");
    std::fs::write(&p, r#"{ "variables": ["x", "y", "z"], "ideal": ["x*y", "z - 1"] }"#).unwrap();
    let o = hyinv(&["dimension", p.to_str().unwrap()]);
    assert_eq!(stdout(&o).trim(), "1");
}

#[test]
fn discretised_model_reparses() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["bouncing_ball.model", "rc.model"] {
        let o = hyinv(&["discretise", &model(name)]);
        assert_eq!(o.status.code(), Some(0));
        let p = dir.path().join(name);
        std::fs::write(&p, &o.stdout).unwrap();
        let a = hyinv(&["--format", "machine", "invariants", p.to_str().unwrap()]);
        let b = hyinv(&["--format", "machine", "invariants", &model(name)]);
        assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
        let ja: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
        let jb: serde_json::Value = serde_json::from_slice(&b.stdout).unwrap();
        assert_eq!(ja["locations"], jb["locations"], "{name}");
    }
}

#[test]
fn simulation_passes_on_corpus() {
    for name in ["bouncing_ball.model", "rc.model", "switching_rotations.model"] {
        let o = hyinv(&["simulate", &model(name), "--schedules", "100", "--seed", "11"]);
        assert_eq!(o.status.code(), Some(0), "{name}: {}", stdout(&o));
        assert!(stdout(&o).contains("PASS"));
    }
}
