use std::path::Path;
use std::process::{Command, Output};

fn lowsens(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lowsens")).args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn gen_cycle() {
    let out = lowsens(&["gen", "cycle", "--n", "6"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("6 6"));
    assert_eq!(text.lines().count(), 7);
}

#[test]
fn match_prints_size() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "fig.el", "6 5\n0 1\n2 3\n0 5\n1 2\n3 4\n");
    let out = lowsens(&["match", "greedy", "--graph", &g, "--seed", "7"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["size"].as_u64().unwrap() as usize, v["matching"].as_array().unwrap().len());
    assert_eq!(v["seed"], 7);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "p.el", "4 3\n0 1\n1 2\n2 3\n");
    assert_eq!(lowsens(&["--help"]).status.code(), Some(0));
    assert_eq!(lowsens(&["--version"]).status.code(), Some(0));
    let bad = lowsens(&["match", "greedy", "--graph", &g, "--frobnicate"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("--frobnicate"));
    assert_eq!(lowsens(&["match", "greedy", "--graph", "/nonexistent/x.el"]).status.code(), Some(1));
    assert_eq!(lowsens(&["match", "blossom", "--graph", &g]).status.code(), Some(1));
    // the eps-derived parameters need far more greedy calls than the budget
    assert_eq!(lowsens(&["match", "approx", "--graph", &g, "--eps", "0.1"]).status.code(), Some(2));
    assert_eq!(lowsens(&["match", "lca", "--graph", &g, "--delta-max", "1"]).status.code(), Some(2));
    assert_eq!(lowsens(&["oracle", "--graph", &g, "--max-n", "3"]).status.code(), Some(2));
}

#[test]
fn csv_and_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "tri.el", "3 3\n0 1\n1 2\n0 2\n");
    let a = lowsens(&["sens", "--alg", "greedy", "--graph", &g, "--trials", "300", "--format", "csv", "--jobs", "1"]);
    let b = lowsens(&["sens", "--alg", "greedy", "--graph", &g, "--trials", "300", "--format", "csv", "--jobs", "3"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("kind,target,mean,se,max,trials"));
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn online_from_order_file() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "p.el", "4 3\n0 1\n1 2\n2 3\n");
    let order = write(dir.path(), "order.txt", "1 2 0 3\n");
    let out = lowsens(&["online", "--alg", "greedy", "--graph", &g, "--arrival-order", "file", "--order-file", &order]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["order"], serde_json::json!([1, 2, 0, 3]));
    assert_eq!(v["sizes"].as_array().unwrap().len(), 4);
    let bad = write(dir.path(), "bad.txt", "1 2 2 3\n");
    let out = lowsens(&["online", "--alg", "greedy", "--graph", &g, "--arrival-order", "file", "--order-file", &bad]);
    assert_eq!(out.status.code(), Some(1));
}
