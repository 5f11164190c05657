use std::process::Command;

use serde_json::Value;

fn run(args: &[&str]) -> (i32, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_phaseperm")).args(args).output().expect("binary runs");
    let json = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (out.status.code().expect("exit code"), json)
}

fn keys_are_stable(v: &Value) {
    let obj = v.as_object().expect("report object");
    let mut keys: Vec<&str> = obj.keys().map(String::as_str).collect();
    keys.sort();
    assert_eq!(keys, ["command", "params", "pass", "results"]);
}

#[test]
fn rep_show_pp_n4() {
    let (code, v) = run(&["rep", "show", "--N", "4", "--basis", "pp"]);
    assert_eq!(code, 0);
    keys_are_stable(&v);
    // X|r,s⟩ = |r,s+1⟩, wrapping to q^r|r,0⟩
    let x = &v["results"]["X"];
    assert_eq!(x["perm"], serde_json::json!([1, 0, 3, 2]));
    assert_eq!(x["phase_turns"], serde_json::json!(["0", "0", "0", "1/2"]));
}

#[test]
fn rep_show_std_z_is_diagonal_powers_of_i() {
    let (code, v) = run(&["rep", "show", "--N", "4", "--basis", "std"]);
    assert_eq!(code, 0);
    let z = &v["results"]["Z"];
    assert_eq!(z["perm"], serde_json::json!([0, 1, 2, 3]));
    assert_eq!(z["phase_turns"], serde_json::json!(["0", "1/4", "1/2", "3/4"]));
}

#[test]
fn rep_show_rejects_non_square() {
    let (code, v) = run(&["rep", "show", "--N", "5", "--basis", "pp"]);
    assert_eq!(code, 2);
    keys_are_stable(&v);
    assert_eq!(v["pass"], false);
}

#[test]
fn bad_flags_are_usage_errors() {
    let (code, _) = run(&["zauner"]);
    assert_eq!(code, 2);
    let (code, _) = run(&["rep", "show", "--N", "4", "--basis", "weird"]);
    assert_eq!(code, 2);
}

#[test]
fn clifford_full_group_n4() {
    let (code, v) = run(&["clifford", "verify", "--N", "4", "--full-group"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["elements"], 768);
    assert!(v["results"]["max_snap_error"].as_f64().unwrap() < 1e-9);
}

#[test]
fn clifford_generators_n9() {
    let (code, v) = run(&["clifford", "verify", "--N", "9"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["generators"].as_array().unwrap().len(), 5);
}

#[test]
fn clifford_budget_exceeded() {
    let (code, v) = run(&["clifford", "verify", "--N", "16", "--full-group", "--budget", "1000"]);
    assert_eq!(code, 3);
    assert!(v["results"]["error"].as_str().unwrap().contains("budget"));
}

#[test]
fn zauner_counts() {
    for (n, blocks, diagonals, inv) in [(4, 1, 1, 2), (9, 2, 3, 4)] {
        let (code, v) = run(&["zauner", "--N", &n.to_string()]);
        assert_eq!(code, 0);
        assert_eq!(v["results"]["blocks"], blocks);
        assert_eq!(v["results"]["diagonals"], diagonals);
        assert_eq!(v["results"]["invariant_dim"], inv);
    }
    let (_, v) = run(&["zauner", "--N", "16"]);
    assert_eq!(v["results"]["invariant_dim"], 6);
}

#[test]
fn solve_n4_symbolic() {
    let (code, v) = run(&["sic", "solve-n4"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["moduli"]["p01"]["symbolic"], "(5-√5)/20");
    assert_eq!(v["results"]["moduli"]["p00"]["symbolic"], "(5+3√5)/20");
    assert_eq!(v["results"]["residuals_exact_zero"], true);
    let p01 = v["results"]["moduli"]["p01"]["decimal"].as_f64().unwrap();
    assert!((p01 - (5.0 - 5f64.sqrt()) / 20.0).abs() < 1e-15);
}

#[test]
fn search_then_check() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.json");
    let path_s = path.to_str().unwrap();
    let args =
        ["sic", "search", "--N", "4", "--zauner", "--seed", "1", "--restarts", "8", "--tol", "1e-9", "--out", path_s];
    let (code, v) = run(&args);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["converged"], true);
    assert_eq!(v["results"]["fiducial"]["basis"], "pp");
    let (_, again) = run(&args);
    assert_eq!(v, again);

    let (code, c) = run(&["sic", "check", "--file", path_s]);
    assert_eq!(code, 0);
    assert!(c["results"]["max_overlap_deviation"].as_f64().unwrap() < 1e-7);
}

#[test]
fn search_not_converged_exit_code() {
    let (code, v) = run(&["sic", "search", "--N", "5", "--restarts", "1", "--max-iters", "1"]);
    assert_eq!(code, 3);
    assert_eq!(v["results"]["converged"], false);
}

#[test]
fn check_rejects_missing_and_non_sic_files() {
    let (code, _) = run(&["sic", "check", "--file", "/nonexistent/f.json"]);
    assert_eq!(code, 2);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("e0.json");
    std::fs::write(&path, r#"{"N":4,"basis":"std","vector":[["1","0"],["0","0"],["0","0"],["0","0"]]}"#).unwrap();
    let (code, v) = run(&["sic", "check", "--file", path.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(v["results"]["coincidences"].as_u64().unwrap() > 0);
}

#[test]
fn theta_commands() {
    let (code, v) = run(&["theta", "--tau", "0+1i", "--n", "2", "--trunc", "40"]);
    assert_eq!(code, 0);
    assert!(v["results"]["max_residual"].as_f64().unwrap() < 1e-10);
    let (code, v) = run(&["theta", "--tau", "0+0.000001i", "--n", "2", "--trunc", "40"]);
    assert_eq!(code, 3);
    assert!(v["results"]["error"].as_str().unwrap().contains("tail bound"));
    let (code, _) = run(&["theta", "--tau", "0-1i", "--n", "2"]);
    assert_eq!(code, 2);
}
