use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_online-embed")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn read(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn write_metric(dir: &Path, name: &str, rows: &[&[&str]]) -> String {
    let dist: Vec<Vec<&str>> = rows.iter().map(|r| r.to_vec()).collect();
    let path = dir.join(name);
    fs::write(&path, serde_json::json!({ "backend": "rational", "dist": dist }).to_string()).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn greedy_tree_on_a_chain_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let m = write_metric(dir.path(), "chain.json", &[&["0", "1", "2"], &["1", "0", "1"], &["2", "1", "0"]]);
    let report = dir.path().join("r.json");
    let out = run(&["embed", "--algo", "greedy-tree", "--metric", &m, "--report", report.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(read(&report)["report"]["distortion"], "1/1");
}

#[test]
fn line_embedding_of_two_points() {
    let dir = tempfile::tempdir().unwrap();
    let m = write_metric(dir.path(), "two.json", &[&["0", "1"], &["1", "0"]]);
    let emb = dir.path().join("e.json");
    let out = run(&["embed", "--algo", "line", "--metric", &m, "--out", emb.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let e = read(&emb);
    assert_eq!(e["pos"], serde_json::json!(["0/1", "1/8"]));
    assert_eq!(e["norm"], "line");
}

#[test]
fn linf_family_of_two_points_has_five_coordinates() {
    let dir = tempfile::tempdir().unwrap();
    let m = write_metric(dir.path(), "two.json", &[&["0", "1"], &["1", "0"]]);
    let emb = dir.path().join("e.json");
    let out = run(&["embed", "--algo", "linf", "--metric", &m, "--delta", "1/2", "--out", emb.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let coords = read(&emb)["coords"].as_array().unwrap().clone();
    assert!(coords.iter().all(|c| c.as_array().unwrap().len() == 5));
}

#[test]
fn steiner_rejects_the_four_cycle() {
    let dir = tempfile::tempdir().unwrap();
    let m = write_metric(
        dir.path(),
        "c4.json",
        &[&["0", "1", "2", "1"], &["1", "0", "1", "2"], &["2", "1", "0", "1"], &["1", "2", "1", "0"]],
    );
    let out = run(&["embed", "--algo", "steiner", "--metric", &m]);
    assert_eq!(code(&out), 2);
}

#[test]
fn malformed_metric_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let m = write_metric(dir.path(), "bad.json", &[&["0", "1"], &["2", "0"]]);
    assert_eq!(code(&run(&["embed", "--algo", "line", "--metric", &m])), 2);
}

#[test]
fn tree_duel_report_and_replay() {
    let dir = tempfile::tempdir().unwrap();
    let t = dir.path().join("t.json");
    let csv_path = dir.path().join("t.csv");
    let out = run(&["duel", "--adversary", "tree", "--n", "3", "--out", t.to_str().unwrap(), "--csv", csv_path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let transcript = read(&t);
    let events = transcript["events"].as_array().unwrap();
    let mut rdr = csv::Reader::from_path(&csv_path).unwrap();
    assert_eq!(rdr.headers().unwrap(), vec!["step", "event", "bound", "measured", "pass"]);
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), events.len());
    let bound3 = rows.iter().find(|r| &r[0] == "3" && &r[1] == "certify:distortion").unwrap();
    assert_eq!(&bound3[2], "4/1");

    let csv2 = dir.path().join("t2.csv");
    let out = run(&["report", t.to_str().unwrap(), "--replay", "--csv", csv2.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("replay: identical"));
    assert_eq!(fs::read(&csv_path).unwrap(), fs::read(&csv2).unwrap());
}

#[test]
fn tampered_transcript_fails_replay() {
    let dir = tempfile::tempdir().unwrap();
    let t = dir.path().join("t.json");
    assert_eq!(code(&run(&["duel", "--adversary", "tree", "--n", "2", "--out", t.to_str().unwrap()])), 0);
    let mut v = read(&t);
    v["report"]["distortion"] = Value::String("1/1".into());
    fs::write(&t, v.to_string()).unwrap();
    assert_eq!(code(&run(&["report", t.to_str().unwrap(), "--replay"])), 1);
}

#[test]
fn l2_and_linf_dim_duels() {
    let out = run(&["duel", "--adversary", "l2", "--n", "4"]);
    assert_eq!(code(&out), 0);
    let out = run(&["duel", "--adversary", "linf-dim", "--n", "2", "--seed", "9"]);
    assert_eq!(code(&out), 0);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("contraction  bound 1199999999/1000000000"), "{stdout}");
}

#[test]
fn feasibility_limits() {
    assert_eq!(code(&run(&["duel", "--adversary", "l2", "--n", "7"])), 2);
    assert_eq!(code(&run(&["duel", "--adversary", "tree", "--n", "2", "--algo", "line"])), 2);
    assert_eq!(code(&run(&["verify", "linf-certificates", "--n", "4"])), 2);
    assert_eq!(code(&run(&["verify", "linf-certificates", "--n", "7", "--delta", "1/2"])), 2);
    assert_eq!(code(&run(&["verify", "linf-certificates", "--epsilon", "1/2", "--delta", "1/3"])), 2);
    assert_eq!(code(&run(&["verify", "linf-certificates", "--delta", "1/2", "--max-branches", "20000000"])), 2);
}

#[test]
fn verify_writes_ordered_summary() {
    let dir = tempfile::tempdir().unwrap();
    let s = dir.path().join("s.json");
    let out = run(&["verify", "line-bounds", "--n", "6", "--trials", "8", "--seed", "4", "--out", s.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let summary = read(&s);
    assert_eq!(summary["passed"], 8);
    let trials: Vec<u64> = summary["results"].as_array().unwrap().iter().map(|r| r["trial"].as_u64().unwrap()).collect();
    assert_eq!(trials, (0..8).collect::<Vec<_>>());
}

#[test]
fn branch_cap_failure_is_reported() {
    let out = run(&["verify", "linf-certificates", "--n", "4", "--delta", "1/4", "--max-branches", "10", "--trials", "1"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL error"));
}
