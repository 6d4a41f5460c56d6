use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

use invgraph::graphs::io;

fn invgraph(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_invgraph"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

struct Inputs {
    _dir: TempDir,
    f0: PathBuf,
    ga: PathBuf,
    gb: PathBuf,
    path3: PathBuf,
}

fn inputs() -> Inputs {
    let dir = TempDir::new().unwrap();
    Inputs {
        f0: write(dir.path(), "f0.json", r#"{"n":6,"edges":[[1,2],[2,3],[3,4],[4,5],[1,5],[4,6]]}"#),
        ga: write(dir.path(), "ga.txt", "4\n1 2\n2 3\n1 4\n"),
        gb: write(dir.path(), "gb.txt", "# second graph\n4\n1 3\n1 4\n2 3\n"),
        path3: write(dir.path(), "p3.txt", "3\n1 2\n2 3\n"),
        _dir: dir,
    }
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn classify_fulvene() {
    let i = inputs();
    let out = invgraph(&["classify", s(&i.f0)]);
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        "{\"schema\":1,\"class\":\"negative\",\"det\":\"-1\",\"signature\":[-1,-1,1,1,1,-1]}\n"
    );
}

#[test]
fn classify_bipartite_reports_both_signatures() {
    let i = inputs();
    let v = stdout_json(&invgraph(&["classify", s(&i.ga)]));
    assert_eq!(v["class"], "positive_and_negative");
    assert_eq!(v["signature"], serde_json::json!([-1, 1, 1, -1]));
    assert_eq!(v["negative_signature"], serde_json::json!([-1, -1, 1, 1]));
}

#[test]
fn invert_outputs_inverse_graph() {
    let i = inputs();
    let v = stdout_json(&invgraph(&["invert", s(&i.f0)]));
    assert_eq!(v["inverse"][5], serde_json::json!([-1, -1, 1, 1, 1, -2]));
    assert_eq!(v["sign"], "negative");
    // double loop at vertex 6; loops are written but never read back
    let edges = v["inverse_graph"]["edges"].as_array().unwrap();
    assert!(edges.contains(&serde_json::json!([6, 6, 2])));
}

#[test]
fn domain_errors_exit_one() {
    let i = inputs();
    let singular = invgraph(&["invert", s(&i.path3)]);
    assert_eq!(singular.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&singular.stderr).contains("singular"));
    let unsignable = invgraph(&["invert", "--sign", "positive", s(&i.f0)]);
    assert_eq!(unsignable.status.code(), Some(1));
    let not_bridgeable = invgraph(&["bound", "--left", s(&i.ga), "--right", s(&i.f0), "--pairs", "1:6"]);
    assert_eq!(not_bridgeable.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_two() {
    let i = inputs();
    assert_eq!(invgraph(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(invgraph(&["classify", "/nonexistent/graph.json"]).status.code(), Some(2));
    assert_eq!(invgraph(&["census", "--m", "5"]).status.code(), Some(2));
    assert_eq!(invgraph(&["fulvene", "--n", "9"]).status.code(), Some(2));
    let bad_pairs = invgraph(&["bridge", "--left", s(&i.ga), "--right", s(&i.gb), "--pairs", "3-1"]);
    assert_eq!(bad_pairs.status.code(), Some(2));
    assert_eq!(invgraph(&["spectrum", s(&i.f0), "--format", "xml"]).status.code(), Some(2));
}

#[test]
fn bound_on_worked_example() {
    let i = inputs();
    let v = stdout_json(&invgraph(&["bound", "--left", s(&i.ga), "--right", s(&i.gb), "--pairs", "3:1,4:2"]));
    assert_eq!(v["schema"], 1);
    assert_eq!(v["lambda_lb"].as_f64(), Some(0.1408));
    assert_eq!(v["lambda_min_pos"].as_f64(), Some(0.2163));
}

#[test]
fn bridge_report() {
    let i = inputs();
    let v = stdout_json(&invgraph(&["bridge", "--left", s(&i.ga), "--right", s(&i.gb), "--pairs", "3:1,4:2"]));
    assert_eq!(v["report"]["condition"], "pr_zero");
    assert_eq!(v["report"]["integrally_invertible"], true);
    assert_eq!(v["report"]["schur_agrees"], true);
    assert_eq!(v["report"]["sign_preserved"], "positive");
    assert_eq!(v["graph"]["n"], 8);
}

#[test]
fn spectrum_precision_and_tsv() {
    let i = inputs();
    let v = stdout_json(&invgraph(&["spectrum", "--precision", "2", s(&i.f0)]));
    assert_eq!(v["eigenvalues"], serde_json::json!([-1.86, -1.62, -0.25, 0.62, 1.0, 2.11]));
    let tsv = invgraph(&["spectrum", "--format", "tsv", s(&i.f0)]);
    let text = String::from_utf8(tsv.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("index\teigenvalue"));
    assert_eq!(text.lines().nth(4), Some("4\t0.6180"));
}

#[test]
fn census_small_and_out_dir() {
    let v = stdout_json(&invgraph(&["census", "--m", "4"]));
    assert_eq!(v["records"].as_array().unwrap().len(), 2);
    let dir = TempDir::new().unwrap();
    let out = invgraph(&["census", "--m", "4", "--format", "tsv", "--out", s(dir.path())]);
    assert!(out.status.success());
    let table = fs::read_to_string(dir.path().join("table1.tsv")).unwrap();
    assert_eq!(table, String::from_utf8(out.stdout).unwrap());
    assert_eq!(table.lines().count(), 3);
    let full: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("table2.json")).unwrap()).unwrap();
    assert_eq!(full["schema"], 1);
    for label in ["Q1", "Q2"] {
        let g = io::from_json(&fs::read_to_string(dir.path().join(format!("{label}.json"))).unwrap()).unwrap();
        assert_eq!(g.n(), 4);
    }
}

#[test]
fn output_independent_of_thread_count() {
    let one = invgraph(&["census", "--m", "6", "--threads", "1"]);
    let many = invgraph(&["census", "--m", "6", "--threads", "4"]);
    assert!(one.status.success());
    assert_eq!(one.stdout, many.stdout);
    let v: Value = serde_json::from_slice(&one.stdout).unwrap();
    assert_eq!(v["records"].as_array().unwrap().len(), 20);
}

#[test]
fn fulvene_with_report() {
    let v = stdout_json(&invgraph(&["fulvene", "--n", "3", "--verify"]));
    assert_eq!(v["vertices"], 48);
    assert_eq!(v["degree_counts"], serde_json::json!([6, 8, 34]));
    assert_eq!(v["report"]["all_hold"], true);
    assert_eq!(v["report"]["det"].as_str().map(|d| d.trim_start_matches('-')), Some("1"));
}

#[test]
fn export_dot_round_trip() {
    let i = inputs();
    for path in [&i.f0, &i.ga, &i.gb] {
        let out = invgraph(&["export-dot", s(path)]);
        assert!(out.status.success());
        let parsed = io::parse_dot(&String::from_utf8(out.stdout).unwrap()).unwrap();
        let original = io::parse_graph(&fs::read_to_string(path).unwrap()).unwrap();
        assert_eq!(parsed, original);
    }
}

#[test]
fn deterministic_output() {
    let i = inputs();
    let a = invgraph(&["invert", s(&i.f0)]);
    let b = invgraph(&["invert", s(&i.f0)]);
    assert_eq!(a.stdout, b.stdout);
}
