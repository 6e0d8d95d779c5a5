use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cubic-genus")).args(args).env_remove("CUBIC_GENUS_PRECISION").output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

#[test]
fn expand_csv_genus1() {
    let out = run(&["expand", "--genus", "1", "--max-j", "5", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = header.iter().position(|h| *h == "F_coeff").unwrap();
    let coeffs: Vec<String> = lines.map(|l| l.split(',').nth(col).unwrap().to_string()).collect();
    assert_eq!(coeffs, ["3/2", "189", "26892", "4076568", "3213210384/5"]);
}

#[test]
fn expand_json_uses_string_rationals() {
    let v = json(&run(&["expand", "--genus", "0", "--max-j", "5"]));
    let last = &v[4]["F_coeff"];
    assert_eq!(last["num"], "540416448");
    assert_eq!(last["den"], "5");
}

#[test]
fn empty_request_is_a_validation_error() {
    let out = run(&["expand", "--genus", "0", "--max-j", "0"]);
    assert_eq!(out.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "validation");
}

#[test]
fn bad_arguments_exit_one() {
    assert_eq!(run(&["oracle", "--vertices", "3"]).status.code(), Some(1));
    assert_eq!(run(&["equilibrium", "--u", "0.1"]).status.code(), Some(1));
    assert_eq!(run(&["validate", "--N", "0", "--u", "0.1"]).status.code(), Some(1));
    assert_eq!(run(&["nonsense"]).status.code(), Some(1));
    assert_eq!(run(&["reproduce", "--skip", "nothing"]).status.code(), Some(1));
}

#[test]
fn oracle_two_vertices() {
    let v = json(&run(&["oracle", "--vertices", "2", "--workers", "1"]));
    assert_eq!(v["p"], 2);
    assert_eq!(v["total"], 15);
    assert_eq!(v["connected"]["0"], 12);
    assert_eq!(v["connected"]["1"], 3);
    assert_eq!(v["disconnected"], 0);
    assert!(v["elapsed_ms"].is_number());
}

#[test]
fn hierarchy_and_critical_are_exact() {
    let h = json(&run(&["hierarchy", "--max-k", "1", "--horizon", "4"]));
    assert_eq!(h["g_hat"][0]["coeffs"][h["g_hat"][0]["offset"].as_i64().map(|o| (1 - o) as usize).unwrap()]["num"], "1");
    assert_eq!(h["b_hat"][1]["offset"], 0);
    let c = json(&run(&["critical", "--max-genus", "2"]));
    assert_eq!(c["c"][1][0]["den"], "5184");
    assert_eq!(c["painleve"]["q"][0]["num"], "-648");
    assert_eq!(c["k"][1]["display"], "1/48");
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let paths: Vec<_> = (0..2).map(|i| dir.path().join(format!("out{i}.json"))).collect();
    for p in &paths {
        let out = run(&["expand", "--genus", "2", "--max-j", "12", "--output", p.to_str().unwrap()]);
        assert!(out.status.success());
    }
    let a = std::fs::read(&paths[0]).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, std::fs::read(&paths[1]).unwrap());
}

#[test]
fn equilibrium_at_critical_point() {
    let v = json(&run(&["equilibrium", "--u", "uc", "--precision", "30"]));
    assert_eq!(v["endpoints"]["critical"], true);
    assert_eq!(v["endpoints"]["b"]["value"], v["endpoints"]["z0"]["value"]);
}

#[test]
fn precision_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_cubic-genus"))
        .args(["equilibrium", "--u", "0.05", "--samples", "0"])
        .env("CUBIC_GENUS_PRECISION", "25")
        .output()
        .unwrap();
    let v = json(&out);
    assert_eq!(v["endpoints"]["a"]["digits"], 25);
}

#[test]
fn validate_small_case() {
    let v = json(&run(&["validate", "--N", "8", "--u", "0.05", "--precision", "40", "--toda"]));
    assert_eq!(v["N"], 8);
    let res: f64 = v["max_string_residual"]["value"].as_str().unwrap().parse().unwrap();
    assert!(res < 1e-35);
    let toda: f64 = v["toda"]["residual"]["value"].as_str().unwrap().parse().unwrap();
    assert!(toda < 1e-4);
}

#[test]
fn reproduce_fast_subset() {
    let out = run(&[
        "reproduce",
        "--skip",
        "oracle6,asymptotics,string-equations,expansion-order,toda-residual",
        "--format",
        "json",
    ]);
    let v = json(&out);
    let list = v.as_array().unwrap();
    assert_eq!(list.len(), 12);
    let passed = list.iter().filter(|o| o["status"] == "pass").count();
    let skipped = list.iter().filter(|o| o["status"] == "skipped").count();
    assert_eq!((passed, skipped), (8, 4));
}
