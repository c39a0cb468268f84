use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn corpus(rel: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(rel).to_string_lossy().into_owned()
}

fn khh(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_khh")).args(args).output().expect("run khh")
}

fn json(args: &[&str]) -> Value {
    let mut a = args.to_vec();
    a.extend(["--format", "json"]);
    let out = khh(&a);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn scratch(name: &str, text: &str) -> String {
    let dir = std::env::temp_dir().join(format!("khh-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

/// `cells` of the first table as (coords, value).
fn cells(v: &Value, table: usize) -> Vec<(Vec<i64>, i64)> {
    v["tables"][table]["cells"]
        .as_array()
        .unwrap()
        .iter()
        .map(|row| {
            let r: Vec<i64> = row.as_array().unwrap().iter().map(|x| x.as_i64().unwrap()).collect();
            (r[..r.len() - 1].to_vec(), r[r.len() - 1])
        })
        .collect()
}

#[test]
fn hh_of_the_cusp() {
    let v = json(&["hh", "--algebra", &corpus("cusp/algebra.alg"), "--n", "1", "--max-weight", "8"]);
    let c = cells(&v, 0);
    assert!(c.contains(&(vec![1, 5], 2)));
    assert!(c.contains(&(vec![1, 1], 0)));
    assert_eq!(v["tables"][0]["metadata"]["convention"], "standard");
}

#[test]
fn hh_of_a_line_vanishes_in_degree_two() {
    let v = json(&["hh", "--algebra", &corpus("line/algebra.alg"), "--n", "2", "--max-weight", "8"]);
    assert!(cells(&v, 0).iter().all(|(_, d)| *d == 0));
}

#[test]
fn hodge_of_the_plane_sits_in_the_top_piece() {
    let v = json(&["hodge", "--algebra", &corpus("plane/algebra.alg"), "--n", "2", "--max-weight", "4"]);
    for (k, d) in cells(&v, 0) {
        if k[2] == 1 {
            assert_eq!(d, 0);
        }
    }
    assert!(cells(&v, 0).contains(&(vec![2, 4, 2], 3)));
}

#[test]
fn typical_pieces() {
    let v = json(&["tk", "--square", &corpus("cusp/square.sq"), "--n", "2", "--max-weight", "8"]);
    let nonzero: Vec<_> = cells(&v, 0).into_iter().filter(|c| c.1 != 0).collect();
    assert_eq!(nonzero, vec![(vec![0, 1], 1), (vec![1, 1], 1), (vec![2, 5], 1), (vec![2, 7], 1)]);
    assert_eq!(v["nk0"], "PASS");
    let smooth = json(&["tk", "--square", &corpus("line/square.sq"), "--n", "2", "--max-weight", "8"]);
    assert!(cells(&smooth, 0).iter().all(|(_, d)| *d == 0));
}

#[test]
fn kunneth_exit_codes() {
    let ok = khh(&["kunneth", "--algebra", &corpus("cusp/algebra.alg"), "--n", "2", "--max-weight", "8", "--j-cutoff", "2"]);
    assert_eq!(ok.status.code(), Some(0));
    let bad = khh(&[
        "kunneth", "--algebra", &corpus("cusp/algebra.alg"), "--n", "2", "--max-weight", "6", "--j-cutoff", "2",
        "--convention", "corrupt-b",
    ]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stdout).contains("MISMATCH"));
}

#[test]
fn parse_and_precondition_errors() {
    let bad = scratch("bad.alg", "algebra bad\nvars x:1\nrel x^^2\n");
    let out = khh(&["hh", "--algebra", &bad, "--n", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
    let out = khh(&["hh", "--algebra", "/nonexistent/a.alg", "--n", "1"]);
    assert_eq!(out.status.code(), Some(3));
    let out = khh(&["hh", "--algebra", &corpus("cusp/algebra.alg"), "--n", "1", "--convention", "sideways"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn cusp_bundle_and_torsion() {
    let v = json(&["cuspbundle", "--curve", &corpus("curve-37a/curve.ec")]);
    assert_eq!(v["order_of_P_minus_Q"], "INFINITE");
    assert!(v["findings"][0].as_str().unwrap().starts_with("TWIST_CONVENTION_CONFLICT"));
    assert_eq!(v["tables"].as_array().unwrap().len(), 6);
    let out = khh(&["cuspbundle", "--curve", &corpus("curve-32a2/curve.ec"), "--points", "1,0;inf"]);
    assert_eq!(out.status.code(), Some(4));
    let neg = json(&["cuspbundle", "--curve", &corpus("curve-37a/curve.ec"), "--convention", "negative"]);
    assert_eq!(neg["tables"][0]["metadata"]["twist_convention"], "negative");
}

#[test]
fn curve_summary() {
    let v = json(&["curve", "--curve", &corpus("curve-32a2/curve.ec")]);
    let orders: Vec<&str> = v["points"].as_array().unwrap().iter().map(|p| p["order"].as_str().unwrap()).collect();
    assert_eq!(orders, vec!["2", "1", "2", "2"]);
}

#[test]
fn smoothness_suite() {
    let v = json(&["smoothness", "--corpus", &corpus("")]);
    assert_eq!(v["violations"], 0);
    let members = v["members"].as_array().unwrap();
    let find = |n: &str| members.iter().find(|m| m["member"] == n).unwrap().clone();
    assert_eq!(find("cusp")["witness"], "i=0, w=1");
    assert_eq!(find("line")["witness"], "NONE");
    assert_eq!(find("cusp-reweighted")["verdict"], "SINGULAR");
}

#[test]
fn csv_and_text_render_the_same_cells() {
    let args = ["cdh-omega", "--square", &corpus("cusp/square.sq"), "--p", "1", "--max-weight", "4"];
    let csv = String::from_utf8(khh(&[&args[..], &["--format", "csv"]].concat()).stdout).unwrap();
    assert_eq!(csv, "# H^q_cdh(Omega^p)\nw,value\n0,0\n1,1\n2,1\n3,1\n4,1\n");
    let text = String::from_utf8(khh(&args).stdout).unwrap();
    assert!(text.contains("# q: 0"));
}
