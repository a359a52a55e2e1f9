use phasepoly::metrics::reduction_pct;
use serde_json::Value;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_phasepoly"))
}

fn bench_file(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/benchmarks").join(format!("{name}.qasm"))
}

fn tmp(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("phasepoly-cli-{}-{name}", std::process::id()))
}

fn optimize(extra: &[&str], out: &PathBuf) -> (Output, Value) {
    let o = bin().arg("optimize").arg(bench_file("tof_3")).args(extra).arg("-o").arg(out).output().unwrap();
    let json = serde_json::from_slice(&o.stdout).unwrap_or(Value::Null);
    (o, json)
}

#[test]
fn optimize_tof3_verified() {
    let out = tmp("tof3.qasm");
    let (o, m) = optimize(&["--group-size", "3", "--verify"], &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(m["schema"], 1);
    assert_eq!(m["verified"], true);
    assert!(m["total_gates"].as_u64().unwrap() <= 35, "{m}");
    assert!(m["cnot_count"].as_u64().unwrap() <= 14, "{m}");
    let red = reduction_pct(45, m["total_gates"].as_u64().unwrap() as usize);
    assert!(red >= 22.22 - 0.005, "{red}");
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("OPENQASM 2.0;"));
    let _ = std::fs::remove_file(out);
}

#[test]
fn complete_coupling_matches_logical() {
    let a = tmp("logical.qasm");
    let b = tmp("complete.qasm");
    let (oa, ma) = optimize(&[], &a);
    let (ob, mb) = optimize(&["--coupling", "complete:5", "--verify"], &b);
    assert!(oa.status.success() && ob.status.success());
    assert_eq!(ma["total_gates"], mb["total_gates"]);
    assert_eq!(ma["cnot_count"], mb["cnot_count"]);
    assert_eq!(mb["verified"], true);
    assert!(mb["initial_mapping"].is_array() && ma.get("initial_mapping").is_none());
    let _ = std::fs::remove_file(a);
    let _ = std::fs::remove_file(b);
}

#[test]
fn stdout_qasm_without_output_flag() {
    let o = bin().arg("optimize").arg(bench_file("tof_3")).output().unwrap();
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("OPENQASM 2.0;"));
    let m: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(m["schema"], 1);
}

#[test]
fn reduction_formula() {
    assert_eq!(format!("{:.2}", reduction_pct(45, 35)), "22.22");
    assert_eq!(format!("{:.2}", reduction_pct(18, 14)), "22.22");
    assert_eq!(reduction_pct(0, 0), 0.0);
}

#[test]
fn empty_suite_prints_header_only() {
    let o = bin().args(["bench", "--suite", "empty"]).output().unwrap();
    assert!(o.status.success());
    let csv = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 1, "{csv}");
    assert!(lines[0].starts_with("circuit,"));
}

#[test]
fn bad_input_exits_1() {
    let p = tmp("bad.qasm");
    std::fs::write(&p, "OPENQASM 2.0;\nqreg q[2];\nfoo q[0];\n").unwrap();
    let o = bin().arg("optimize").arg(&p).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    let o = bin().arg("optimize").arg(tmp("missing.qasm")).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    let o = bin().args(["optimize", "--no-such-flag"]).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    let o = bin().args(["bench", "--suite", "nope"]).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    let _ = std::fs::remove_file(p);
}

#[test]
fn bad_coupling_exits_1() {
    let o = bin().arg("optimize").arg(bench_file("tof_3")).args(["--coupling", "line:2"]).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    let o = bin().arg("optimize").arg(bench_file("tof_3")).args(["--coupling", "ring:5"]).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn json_coupling_file() {
    let g = tmp("graph.json");
    std::fs::write(&g, r#"{"n": 5, "edges": [[0,1],[1,2],[2,3],[3,4],[4,0],[0,2],[1,3],[2,4],[3,0],[4,1]]}"#).unwrap();
    let out = tmp("json.qasm");
    let (o, m) = optimize(&["--coupling", g.to_str().unwrap(), "--verify"], &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(m["verified"], true);
    let _ = std::fs::remove_file(g);
    let _ = std::fs::remove_file(out);
}
