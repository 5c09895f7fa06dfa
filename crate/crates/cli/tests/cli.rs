use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_nct-morita"));
    c.env_remove("NCT_MORITA_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

const THETA3: &str = r#"{"theta": [["0","1/2","1/3"],["-1/2","0","1/4"],["-1/3","-1/4","0"]]}"#;

#[test]
fn sigma2_twice_echoes_theta() {
    let dir = tempfile::tempdir().unwrap();
    let th = write(dir.path(), "t.json", THETA3);
    let out = run(&["theta", "act", "--theta", arg(&th), "--word", r#"["sigma2","sigma2"]"#]);
    assert_eq!(out.status.code(), Some(0));
    let input: Value = serde_json::from_str(THETA3).unwrap();
    assert_eq!(json(&out), input);
}

#[test]
fn word_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let th = write(dir.path(), "t.json", r#"[["0","1/5"],["-1/5","0"]]"#);
    let w = write(dir.path(), "w.json", r#"[{"rho": [[0,1],[1,0]]}, {"nu": [[0,2],[-2,0]]}]"#);
    let out = run(&["theta", "act", "--theta", arg(&th), "--word", &format!("@{}", arg(&w))]);
    assert_eq!(out.status.code(), Some(0));
    // ρ(swap) flips the sign in n = 2, then ν adds 2.
    assert_eq!(json(&out)["theta"][0][1], "9/5");
}

#[test]
fn pauli_pair() {
    let out = run(&["clifford", "emit", "--n", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["dim"], 2);
    let g = &v["generators"];
    let entry = |k: usize, i: usize, j: usize| (g[k][i][j][0].as_f64().unwrap(), g[k][i][j][1].as_f64().unwrap());
    assert_eq!(entry(0, 0, 1), (1.0, 0.0));
    assert_eq!(entry(0, 1, 0), (1.0, 0.0));
    assert_eq!(entry(1, 0, 1), (0.0, -1.0));
    assert_eq!(entry(1, 1, 0), (0.0, 1.0));
    assert_eq!(entry(0, 0, 0), (0.0, 0.0));
}

#[test]
fn non_integer_matrix_is_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", r#"{"matrix": [[1, 0.5], [0, 1]]}"#);
    let out = run(&["theta", "verify-element", "--matrix", arg(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["error"]["kind"], "Schema");
}

#[test]
fn membership_pass_and_fail() {
    let dir = tempfile::tempdir().unwrap();
    let id = write(dir.path(), "id.json", "[[1,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]]");
    assert_eq!(run(&["theta", "verify-element", "--matrix", arg(&id)]).status.code(), Some(0));
    let no = write(dir.path(), "no.json", "[[1,0,1,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]]");
    let out = run(&["theta", "verify-element", "--matrix", arg(&no)]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["member"], false);
}

#[test]
fn usage_errors() {
    let out = run(&["theta", "act", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["error"]["kind"], "Usage");
    assert_eq!(run(&["clifford", "emit", "--n", "0"]).status.code(), Some(2));
    assert_eq!(run(&["example", "circle", "--cutoff", "3"]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    let missing = run(&["theta", "verify-element", "--matrix", "/nonexistent/m.json"]);
    assert_eq!(missing.status.code(), Some(2));
    assert_eq!(json(&missing)["error"]["kind"], "Io");
}

#[test]
fn singular_block_fails_with_step() {
    let dir = tempfile::tempdir().unwrap();
    let th = write(dir.path(), "t.json", r#"[["0","0","1"],["0","0","1"],["-1","-1","0"]]"#);
    let out = run(&["theta", "act", "--theta", arg(&th), "--word", r#"[{"nu": [[0,0,0],[0,0,0],[0,0,0]]}, "sigma2"]"#]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["error"]["kind"], "ActionUndefined");
    assert_eq!(v["error"]["step"], 1);
}

#[test]
fn invalid_seed_is_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let th = write(dir.path(), "t.json", r#"[["0","1/2"],["-1/2","0"]]"#);
    let out = bin().env("NCT_MORITA_SEED", "x").args(["algebra", "check", "--theta", arg(&th)]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

/// Emitted θ and Dirac documents are accepted back and re-emitted unchanged.
#[test]
fn round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let th = write(dir.path(), "t.json", THETA3);
    let d = write(
        dir.path(),
        "d.json",
        r#"{"n": 3, "tau": [["1","2","0"],["0","1/3","0"],["1","0","-1"]], "mu_shift": ["1/2","0","0"]}"#,
    );
    let first = run(&["dirac", "transform", "--dirac", arg(&d), "--theta", arg(&th), "--word", r#"["sigma2"]"#]);
    assert_eq!(first.status.code(), Some(0));
    let doc = write(dir.path(), "out.json", std::str::from_utf8(&first.stdout).unwrap());
    let again = run(&["dirac", "transform", "--dirac", arg(&doc), "--theta", arg(&doc), "--word", "[]"]);
    assert_eq!(again.status.code(), Some(0));
    let (a, b) = (json(&first), json(&again));
    assert_eq!(a["dirac"], b["dirac"]);
    assert_eq!(a["theta"], b["theta"]);

    let acted = run(&["theta", "act", "--theta", arg(&th), "--word", r#"["sigma2"]"#]);
    let acted_doc = write(dir.path(), "acted.json", std::str::from_utf8(&acted.stdout).unwrap());
    let echoed = run(&["theta", "act", "--theta", arg(&acted_doc), "--word", "[]"]);
    assert_eq!(acted.stdout, echoed.stdout);
}

#[test]
fn bounded_part_round_trips_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let th = write(dir.path(), "t.json", r#"[["0","1/2"],["-1/2","0"]]"#);
    let d = write(
        dir.path(),
        "d.json",
        r#"{"n": 2, "tau": [["1","0"],["0","1"]], "B": [[[0.1, 0], [0.3, 0.7]], [[0.3, -0.7], [-2.5e-3, 0]]], "mu_shift": ["0","0"]}"#,
    );
    let first = run(&["dirac", "transform", "--dirac", arg(&d), "--theta", arg(&th), "--word", "[]"]);
    assert_eq!(first.status.code(), Some(0));
    let doc = write(dir.path(), "out.json", std::str::from_utf8(&first.stdout).unwrap());
    let again = run(&["dirac", "transform", "--dirac", arg(&doc), "--theta", arg(&doc), "--word", "[]"]);
    assert_eq!(first.stdout, again.stdout);
    assert_eq!(json(&first)["dirac"]["B"][0][1][1].as_f64(), Some(0.7));
}

#[test]
fn involution_check_passes() {
    let dir = tempfile::tempdir().unwrap();
    let th = write(dir.path(), "t.json", THETA3);
    let d = write(dir.path(), "d.json", r#"{"n": 3, "tau": [["2","1","0"],["0","1","0"],["0","0","1"]], "mu_shift": ["0","0","1/2"]}"#);
    let out = run(&["dirac", "involution-check", "--dirac", arg(&d), "--theta", arg(&th)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["tau_restored"], true);
}

#[test]
fn deterministic_output() {
    let dir = tempfile::tempdir().unwrap();
    let th = write(dir.path(), "t.json", r#"[["0","1/2"],["-1/2","0"]]"#);
    let module = ["module", "verify", "--theta", arg(&th), "--grid", "256,8,4"];
    let a = run(&module);
    let b = run(&module);
    assert_eq!(a.stdout, b.stdout);
    assert!(json(&a)["residuals"]["right_relation"].is_number());

    let algebra = ["algebra", "check", "--theta", arg(&th), "--samples", "20"];
    let (a, b) = (run(&algebra), run(&algebra));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let seeded = bin().env("NCT_MORITA_SEED", "7").args(algebra).output().unwrap();
    assert_eq!(json(&seeded)["seed"], 7);

    let (a, b) = (run(&["example", "circle"]), run(&["example", "circle"]));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn circle_example() {
    let out = run(&["example", "circle", "--cutoff", "64"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["epsilon_j"], -1);
    assert_eq!(v["c_is_self_adjoint"], true);
    assert!(v["self_adjoint"]["residual"].as_f64().unwrap() < 1e-12);
    let anti = &v["anti_self_adjoint"];
    let ratio = anti["residual"].as_f64().unwrap() / anti["c_norm"].as_f64().unwrap();
    assert!((ratio - 2.0).abs() < 1e-12);
}

#[test]
fn module_verify_singular_reports_failure() {
    let dir = tempfile::tempdir().unwrap();
    let th = write(dir.path(), "t.json", r#"[["0","0"],["0","0"]]"#);
    let out = run(&["module", "verify", "--theta", arg(&th), "--grid", "256,8,4"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["error"], "Theta11Singular");
    let bad = run(&["module", "verify", "--theta", arg(&th), "--grid", "100,8,4"]);
    assert_eq!(bad.status.code(), Some(2));
    assert_eq!(json(&bad)["error"]["kind"], "InvalidGrid");
}
