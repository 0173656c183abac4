use std::path::Path;
use std::process::{Command, Output};

use rnni::io::{parse_cluster_format, parse_moves};
use rnni::TreePath;
use serde_json::Value;

fn rnni(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rnni"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const T4: &str = "[{a1,a2},{a1,a2,a3},{a1,a2,a3,a4}]";
const R4: &str = "[{a3,a4},{a2,a3,a4},{a1,a2,a3,a4}]";

#[test]
fn distance_of_counterexample_pair() {
    let dir = tempfile::tempdir().unwrap();
    let t = write(dir.path(), "t.trees", T4);
    let r = write(dir.path(), "r.trees", R4);
    let out = rnni(&["distance", &t, &r]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "3\n");
    assert_eq!(stdout(&rnni(&["distance", &t, &t])), "0\n");

    let out = rnni(&["distance", &t, &r, "--rho", "2"]);
    assert_eq!(stdout(&out), "4\n");
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
}

#[test]
fn distance_of_five_leaf_caterpillars() {
    let dir = tempfile::tempdir().unwrap();
    let t = write(dir.path(), "t.txt", "[{a1,a2},{a1,a2,a3},{a1,a2,a3,a4},{a1,a2,a3,a4,a5}]\n");
    let r = write(dir.path(), "r.txt", "[{a1,a5},{a1,a4,a5},{a1,a3,a4,a5},{a1,a2,a3,a4,a5}]\n");
    assert_eq!(stdout(&rnni(&["distance", &t, &r])), "6\n");
}

#[test]
fn newick_inputs_by_extension() {
    let dir = tempfile::tempdir().unwrap();
    let t = write(dir.path(), "t.nwk", "(((a1:1,a2:1):1,a3:2):1,a4:3);");
    let r = write(dir.path(), "r.nwk", "(a1:3,(a2:2,(a3:1,a4:1):1):1);");
    assert_eq!(stdout(&rnni(&["distance", &t, &r])), "3\n");
    // Explicit override of a misleading extension.
    let c = write(dir.path(), "c.nwk", T4);
    let d = write(dir.path(), "d.nwk", R4);
    assert_eq!(stdout(&rnni(&["distance", &c, &d, "--format", "clusters"])), "3\n");
}

#[test]
fn tied_newick_heights() {
    let dir = tempfile::tempdir().unwrap();
    let t = write(dir.path(), "t.nwk", "((a1:1,a2:1):1,(a3:2,a4:2):0);");
    let out = rnni(&["distance", &t, &t]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("tied"));
    let out = rnni(&["distance", &t, &t, "--break-ties"]);
    assert_eq!(stdout(&out), "0\n");
}

#[test]
fn input_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let t = write(dir.path(), "t.trees", T4);
    let bad = write(dir.path(), "bad.trees", "[{a1,a2},{a3,a4},{a1,a2,a3},{a1,a2,a3,a4}]");
    let other = write(dir.path(), "o.trees", "[{b1,b2},{b1,b2,b3},{b1,b2,b3,b4}]");
    for args in [
        vec!["distance", &t, &bad],
        vec!["distance", &t, &other],
        vec!["path", &t, "missing.trees"],
        vec!["check", "--n", "9"],
        vec!["random", "--n", "1"],
        vec!["bench", "--n", "2"],
    ] {
        let out = rnni(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn path_moves_replay_to_target() {
    let dir = tempfile::tempdir().unwrap();
    let t = write(dir.path(), "t.trees", T4);
    let r = write(dir.path(), "r.trees", R4);
    let moves = stdout(&rnni(&["path", &t, &r]));
    assert_eq!(moves, "nni 2 {a3}\nrank 1\nnni 2 {a2}\n");
    let start = parse_cluster_format(T4).unwrap();
    let parsed = parse_moves(&moves, start.labels()).unwrap();
    let end = TreePath::from_moves(start, &parsed).unwrap().end();
    assert_eq!(end, parse_cluster_format(R4).unwrap());

    assert_eq!(stdout(&rnni(&["path", &t, &t])), "");
}

#[test]
fn path_trees_lists_every_tree() {
    let dir = tempfile::tempdir().unwrap();
    let t = write(dir.path(), "t.trees", T4);
    let r = write(dir.path(), "r.trees", R4);
    let trees = stdout(&rnni(&["path", &t, &r, "--emit", "trees"]));
    assert_eq!(
        trees.lines().collect::<Vec<_>>(),
        vec![
            T4,
            "[{a1,a2},{a3,a4},{a1,a2,a3,a4}]",
            "[{a3,a4},{a1,a2},{a1,a2,a3,a4}]",
            R4,
        ]
    );
}

#[test]
fn random_paths_replay() {
    let dir = tempfile::tempdir().unwrap();
    let text = stdout(&rnni(&["random", "--n", "30", "--count", "2", "--seed", "5"]));
    let lines: Vec<&str> = text.lines().collect();
    let t = write(dir.path(), "t.trees", lines[0]);
    let r = write(dir.path(), "r.trees", lines[1]);
    let moves = stdout(&rnni(&["path", &t, &r]));
    let start = parse_cluster_format(lines[0]).unwrap();
    let parsed = parse_moves(&moves, start.labels()).unwrap();
    let d: usize = stdout(&rnni(&["distance", &t, &r])).trim().parse().unwrap();
    assert_eq!(parsed.len(), d);
    assert_eq!(TreePath::from_moves(start, &parsed).unwrap().end(), parse_cluster_format(lines[1]).unwrap());
}

#[test]
fn check_reports_counts_and_counterexamples() {
    let out = rnni(&["check", "--n", "4", "--workers", "2"]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("18 trees, 153 pairs, all FindPath lengths = BFS\n"));

    let out = rnni(&["--json", "check", "--n", "4", "--rho", "2"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["command"], "check");
    assert_eq!(v["n"], 4);
    assert_eq!(v["pairs_checked"], 153);
    assert_eq!(v["failures"], Value::Array(vec![]));
    assert!(v["result"]["rho"][0]["suboptimal"].as_u64().unwrap() >= 1);

    let out = rnni(&["check", "--n", "2"]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("1 trees, 0 pairs"));
}

#[test]
fn random_is_deterministic_and_uniform_on_two_leaves() {
    let a = stdout(&rnni(&["random", "--n", "8", "--count", "5", "--seed", "3"]));
    let b = stdout(&rnni(&["random", "--n", "8", "--count", "5", "--seed", "3"]));
    assert_eq!(a, b);
    assert_eq!(a.lines().count(), 5);
    let two = stdout(&rnni(&["random", "--n", "2", "--count", "4"]));
    assert!(two.lines().all(|l| l == "[{a1,a2}]"));
    let nwk = stdout(&rnni(&["random", "--n", "2", "--format", "newick"]));
    assert_eq!(nwk, "(a1:1,a2:1);\n");
}

#[test]
fn bench_counts_caterpillar_moves() {
    let out = rnni(&["--json", "bench", "--n", "3"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["result"]["moves"][0], 1);

    let out = rnni(&["--json", "bench", "--n", "100", "--mode", "random", "--reps", "3", "--seed", "9"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["seed"], 9);
    assert_eq!(v["result"]["moves"].as_array().unwrap().len(), 3);
    assert!(v["wall_ms"].as_f64().unwrap() >= 0.0);
}

#[test]
fn graph_dump_of_three_leaves() {
    let text = stdout(&rnni(&["graph", "--n", "3"]));
    assert_eq!(
        text,
        "# vertices\n0 [{a1,a2},{a1,a2,a3}]\n1 [{a1,a3},{a1,a2,a3}]\n2 [{a2,a3},{a1,a2,a3}]\n\
         # edges\n0 1 nni\n0 2 nni\n1 2 nni\n"
    );
    let four = stdout(&rnni(&["graph", "--n", "4"]));
    assert_eq!(four.lines().filter(|l| l.ends_with(" rank")).count(), 3);
}

#[test]
fn json_and_text_agree() {
    let dir = tempfile::tempdir().unwrap();
    let t = write(dir.path(), "t.trees", T4);
    let r = write(dir.path(), "r.trees", R4);
    let v: Value = serde_json::from_slice(&rnni(&["--json", "distance", &t, &r]).stdout).unwrap();
    assert_eq!(v["result"]["distance"].to_string() + "\n", stdout(&rnni(&["distance", &t, &r])));
    for key in ["command", "n", "pairs_checked", "failures", "wall_ms", "seed"] {
        assert!(v.get(key).is_some(), "{key}");
    }
}
