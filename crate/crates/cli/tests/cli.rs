use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_confring")).args(args).output().expect("spawn confring")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(args: &[&str]) -> (Value, i32) {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let o = run(&all);
    let v = serde_json::from_str(stdout(&o).trim()).unwrap_or_else(|e| panic!("{e}: {}", stdout(&o)));
    (v, o.status.code().unwrap())
}

#[test]
fn betti_orbit_ring() {
    let (v, code) = json(&["betti", "--space", "orbit", "--n", "3", "--m", "2"]);
    assert_eq!(code, 0);
    assert_eq!(v["poincare"], serde_json::json!([1, 4, 3]));
}

#[test]
fn betti_projective() {
    let (v, code) = json(&["betti", "--space", "rpn", "--n", "3", "--k", "3"]);
    assert_eq!(code, 0);
    let groups: Vec<(u64, u64)> = v["groups"]
        .as_array()
        .unwrap()
        .iter()
        .map(|g| (g["degree"].as_u64().unwrap(), g["rank"].as_u64().unwrap()))
        .collect();
    assert_eq!(groups, vec![(0, 1), (2, 1), (3, 1), (5, 1)]);
}

#[test]
fn characteristic_two_is_a_usage_error() {
    let o = run(&["betti", "--space", "rpn", "--n", "3", "--k", "3", "--coeff", "f2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("invertible"));
}

#[test]
fn integral_sphere_table() {
    let (v, code) = json(&["betti", "--space", "sphere-orbit", "--n", "4", "--k", "3", "--coeff", "z"]);
    assert_eq!(code, 0);
    let h7 = v["groups"].as_array().unwrap().iter().find(|g| g["degree"] == 7).unwrap();
    assert_eq!(h7["rank"], 1);
    assert_eq!(h7["torsion"].as_array().unwrap().len(), 3);
}

#[test]
fn eval_examples() {
    let o = run(&["eval", "A[2,0]*A[2,1]", "--n", "3", "--m", "2"]);
    assert_eq!(stdout(&o).trim(), "A[1,0]*A[2,1] - A[1,0]*A[2,0]");
    assert_eq!(stdout(&run(&["eval", "A[1,0]", "--act", "1"])).trim(), "-A[1,0]");
    assert_eq!(stdout(&run(&["eval", "1"])).trim(), "1");
    let o = run(&["eval", "A[1,0]", "--by", "A[2,0]", "--m", "2"]);
    assert_eq!(stdout(&o).trim(), "A[1,0]*A[2,0]");
}

#[test]
fn eval_parse_error_reports_position() {
    let o = run(&["eval", "A[1,0] + * A[2,0]"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("position 9"));
}

#[test]
fn verify_suites() {
    for args in [
        &["verify", "--suite", "relations", "--n", "4", "--m", "6"][..],
        &["verify", "--suite", "action", "--n", "3", "--m", "3"],
        &["verify", "--suite", "all", "--n", "2", "--m", "2"],
    ] {
        let (v, code) = json(args);
        assert_eq!(code, 0, "{args:?}");
        assert_eq!(v["passed"], true);
    }
}

#[test]
fn tc_examples() {
    let (v, code) = json(&["tc", "--n", "5", "--k", "3", "--s", "1"]);
    assert_eq!((code, &v["exact"]), (0, &serde_json::json!(3)));
    let (v, _) = json(&["tc", "--n", "3", "--k", "2", "--s", "2"]);
    assert_eq!(v["exact"], 4);
    assert_eq!(v["witness"].as_array().unwrap().len(), 4);
    let (v, _) = json(&["tc", "--n", "2", "--k", "2", "--s", "2"]);
    assert!(v["lower"].as_u64().unwrap() >= 3);
    assert_eq!(v["upper"], 4);
    let (v, _) = json(&["tc", "--n", "2", "--k", "2", "--s", "2", "--quantity", "zcl", "--mode", "exact-small"]);
    assert!(matches!(v["exact"].as_u64(), Some(3 | 4)));
}

#[test]
fn tc_budget_exhaustion() {
    let (v, code) = json(&["tc", "--n", "3", "--k", "2", "--s", "2", "--budget", "10"]);
    assert_eq!(code, 3);
    assert_eq!(v["upper"], 4);
}

#[test]
fn json_is_deterministic() {
    let args = ["verify", "--suite", "action", "--n", "2", "--m", "2", "--seed", "5", "--format", "json"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn invariants_and_spectral() {
    let (v, code) = json(&["invariants", "--n", "4", "--m", "3", "--punctured"]);
    assert_eq!(code, 0);
    assert_eq!(v["poincare"], serde_json::json!([1, 3, 5, 3]));
    let (v, code) = json(&["spectral", "--n", "4", "--k", "3"]);
    assert_eq!(code, 0);
    assert_eq!(v["permanent_cycles"]["dims"], serde_json::json!([1, 3, 0]));
}

#[test]
fn thread_cap_is_honored() {
    let o = Command::new(env!("CARGO_BIN_EXE_confring"))
        .args(["betti", "--space", "rpn", "--n", "4", "--k", "3"])
        .env("CONFRING_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let o = Command::new(env!("CARGO_BIN_EXE_confring"))
        .args(["betti", "--space", "orbit", "--n", "3", "--m", "1"])
        .env("CONFRING_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bad_flags_exit_two() {
    assert_eq!(run(&["betti", "--space", "orbit", "--n", "3"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["betti", "--space", "orbit", "--n", "1", "--m", "2"]).status.code(), Some(2));
}
