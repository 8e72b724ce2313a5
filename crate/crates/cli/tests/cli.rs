use std::path::Path;
use std::process::{Command, Output};

fn rhc(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rhc"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("spawn rhc")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).trim().to_string()
}

#[test]
fn ward_counterexample_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert!(rhc(d, &["generate", "--kind", "ward", "--m", "5", "--out", "w"]).status.success());
    assert!(rhc(d, &["cluster", "--input", "w.sim", "--algo", "ward", "--out", "w.tree"]).status.success());
    let o = rhc(d, &["eval", "--tree", "w.tree", "--target", "w.labels"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "0.1667");
}

#[test]
fn oversized_noise_is_rejected_with_the_bound() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    rhc(d, &["generate", "--kind", "ward", "--m", "5", "--out", "w"]);
    let o = rhc(d, &["cluster", "--input", "w.sim", "--alpha", "0.2", "--out", "r.tree"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("t_init = 37"), "{err}");
    assert!(!d.join("r.tree").exists());
}

#[test]
fn labeling_against_itself_scores_zero() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    rhc(d, &["generate", "--kind", "matched-pairs", "--n", "16", "--out", "m"]);
    let o = rhc(d, &["eval", "--pred", "m.labels", "--target", "m.labels"]);
    assert_eq!(stdout(&o), "0.0000");
}

#[test]
fn usage_errors_exit_two_and_help_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(rhc(d, &["frobnicate"]).status.code(), Some(2));
    assert_eq!(rhc(d, &["cluster"]).status.code(), Some(2));
    assert_eq!(rhc(d, &["--help"]).status.code(), Some(0));
    assert_eq!(rhc(d, &["--version"]).status.code(), Some(0));
}

#[test]
fn malformed_input_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("bad.sim"), "n=2\n1\t0.5\n0.4\t1\n").unwrap();
    let o = rhc(d, &["cluster", "--input", "bad.sim", "--algo", "single"]);
    assert_eq!(o.status.code(), Some(2));
    let o = rhc(d, &["cluster", "--input", "missing.sim", "--algo", "single"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn rmnl_recovers_aistat_fields_and_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert!(rhc(d, &["generate", "--kind", "aistat", "--seed", "3", "--out", "a"]).status.success());
    let sim = std::fs::read_to_string(d.join("a.sim")).unwrap();
    assert!(sim.contains("# seed: 3"));
    let o = rhc(d, &["cluster", "--input", "a.sim", "--alpha", "0.0625", "--out", "a.tree"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let tree = rhc::io::MergeTreeFile::read(d.join("a.tree")).unwrap();
    let text = tree.format();
    assert_eq!(rhc::io::MergeTreeFile::parse(&text).unwrap().format(), text);
    for t in ["a.labels", "a.split-ai.labels", "a.split-stats.labels"] {
        let o = rhc(d, &["eval", "--tree", "a.tree", "--target", t]);
        assert_eq!(stdout(&o), "0.0000", "{t}");
    }
}

#[test]
fn inductive_writes_labels_for_every_point() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    rhc(d, &["generate", "--kind", "planted", "--sizes", "40,40", "--alpha", "0.02", "--nu", "0.02", "--out", "p"]);
    let o = rhc(d, &[
        "inductive", "--input", "p.sim", "--alpha", "0.02", "--nu", "0.02", "--sample-n", "40", "--target",
        "p.labels", "--out", "ind",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (labels, _) = rhc::io::read_labels(d.join("ind.labels")).unwrap();
    assert_eq!(labels.len(), 80);
    let e = rhc(d, &["eval", "--pred", "ind.labels", "--target", "p.labels"]);
    let err: f64 = stdout(&e).parse().unwrap();
    assert!(err <= 0.25, "{err}");
}

#[test]
fn noise_and_sweep_produce_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    rhc(d, &["generate", "--kind", "ward", "--out", "w"]);
    let o = rhc(d, &["noise", "--input", "w.sim", "--kind", "sim-corrupt", "--p", "0.1", "--seed", "1", "--out", "n.sim"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (noisy, prov) = rhc::io::read_similarity(d.join("n.sim")).unwrap();
    assert_eq!(noisy.len(), 30);
    assert_eq!(prov.get("seed"), Some("1"));
    let o = rhc(d, &["sweep", "--n", "64", "--levels", "0", "--seeds", "0,1", "--algos", "single,average"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    assert!(out.contains("single") && out.contains("average"), "{out}");
}
