use std::path::Path;
use std::process::{Command, Output};

use anchorlab_cli::dataset;
use anchorlab_cli::report::{self, Row};

fn cli(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_anchorlab"))
        .args(args)
        .current_dir(dir)
        .env_remove("ANCHORLAB_SEED")
        .output()
        .unwrap()
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = cli(dir, args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn fails_with(dir: &Path, args: &[&str], code: i32, needle: &str) {
    let out = cli(dir, args);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert_eq!(out.status.code(), Some(code), "{args:?}: {stderr}");
    assert!(stderr.starts_with("error:"), "{stderr}");
    assert!(stderr.contains(needle), "{stderr}");
}

fn value(rows: &[Row], metric: &str, rep: &str, group: &str) -> f64 {
    rows.iter()
        .find(|r| r.metric == metric && r.representation == rep && r.group == group)
        .unwrap_or_else(|| panic!("no row {metric}/{rep}/{group}"))
        .value
}

#[test]
fn gen_writes_requested_counts() {
    let dir = tempfile::tempdir().unwrap();
    let stdout = ok(dir.path(), &["gen", "--seed", "7", "--count", "100", "--mix", "1,1,1", "--out", "d.jsonl"]);
    let records = dataset::read(&dir.path().join("d.jsonl")).unwrap();
    assert_eq!(records.len(), 100);
    assert!(stdout.contains("wrote 100 samples"));
    let per_case: usize = stdout
        .split_whitespace()
        .filter_map(|w| w.trim_end_matches(')').split_once('='))
        .map(|(_, n)| n.parse::<usize>().unwrap())
        .sum();
    assert_eq!(per_case, 100);
}

#[test]
fn seed_falls_back_to_environment() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["gen", "--seed", "42", "--count", "5", "--out", "flag.jsonl"]);
    let out = Command::new(env!("CARGO_BIN_EXE_anchorlab"))
        .args(["gen", "--count", "5", "--out", "env.jsonl"])
        .current_dir(dir.path())
        .env("ANCHORLAB_SEED", "42")
        .output()
        .unwrap();
    assert!(out.status.success());
    ok(dir.path(), &["gen", "--count", "5", "--out", "default.jsonl"]);
    let read = |f: &str| std::fs::read(dir.path().join(f)).unwrap();
    assert_eq!(read("flag.jsonl"), read("env.jsonl"));
    assert_ne!(read("flag.jsonl"), read("default.jsonl"));
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    fails_with(dir.path(), &["gen", "--count", "0", "--out", "x.jsonl"], 2, "count");
    fails_with(dir.path(), &["gen", "--mix", "1,1", "--out", "x.jsonl"], 2, "--mix");
    fails_with(dir.path(), &["gen", "--count", "3", "--out", "missing/dir/x.jsonl"], 2, "cannot write");
    ok(dir.path(), &["gen", "--count", "20", "--out", "d.jsonl"]);
    fails_with(dir.path(), &["eval", "d.jsonl", "--model", "nosuch", "--out", "e.csv"], 2, "anchor-radial");
    fails_with(dir.path(), &["eval", "d.jsonl", "--split", "loo", "--out", "e.csv"], 2, "unknown split");
    fails_with(dir.path(), &["stats", "nope.jsonl", "--out", "s.csv"], 2, "cannot read");
}

#[test]
fn data_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["gen", "--count", "4", "--out", "d.jsonl"]);
    let text = std::fs::read_to_string(dir.path().join("d.jsonl")).unwrap();
    let first = text.lines().next().unwrap();
    std::fs::write(dir.path().join("one.jsonl"), format!("{first}\n")).unwrap();
    fails_with(dir.path(), &["stats", "one.jsonl", "--out", "s.csv"], 3, "insufficient samples");
    std::fs::write(dir.path().join("bad.jsonl"), format!("{first}\n{first}\n{{\"image\": 3}}\n")).unwrap();
    fails_with(dir.path(), &["stats", "bad.jsonl", "--out", "s.csv"], 3, "bad.jsonl:3:");
    let anchorless = r#"{"image":{"w":10,"h":10},"dissection":{"x":1,"y":1},"grasp":{"x":2,"y":2}}"#;
    std::fs::write(dir.path().join("na.jsonl"), format!("{first}\n{anchorless}\n")).unwrap();
    fails_with(dir.path(), &["augment", "na.jsonl", "--out", "a.jsonl"], 3, "na.jsonl:2:");
}

#[test]
fn stats_report_orders_representations() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["gen", "--seed", "3", "--count", "600", "--out", "d.jsonl"]);
    ok(dir.path(), &["stats", "d.jsonl", "--out", "s.csv"]);
    let rows = report::read(&dir.path().join("s.csv")).unwrap();
    for case in ["case1", "case2", "case3"] {
        let abs = value(&rows, "grasp_std_x", "absolute", case);
        let rel = value(&rows, "grasp_std_x", "relative", case);
        let anc = value(&rows, "grasp_std_x", "anchor", case);
        assert!(anc < rel && rel < abs, "{case}");
        assert!(value(&rows, "ttest_x_p", "anchor_vs_relative_absdev", case) < 0.01);
    }
    assert!(!rows.iter().any(|r| r.representation == "relative" && r.metric.starts_with("dissect")));
    for kind in ["absolute", "relative", "anchor"] {
        for case in ["case1", "case2", "case3"] {
            let svg = std::fs::read_to_string(dir.path().join(format!("scatter_{kind}_{case}.svg"))).unwrap();
            assert!(svg.contains("width=\"600\" height=\"600\""));
        }
    }
}

#[test]
fn augmentation_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["gen", "--seed", "9", "--count", "90", "--out", "d.jsonl"]);
    ok(dir.path(), &["augment", "d.jsonl", "--alpha-max", "0", "--out", "same.jsonl"]);
    let src = dataset::read(&dir.path().join("d.jsonl")).unwrap();
    let same = dataset::read(&dir.path().join("same.jsonl")).unwrap();
    for (i, (a, b)) in src.iter().zip(&same).enumerate() {
        assert_eq!((a.grasp, a.dissection, a.anchor), (b.grasp, b.dissection, b.anchor));
        assert_eq!(b.meta["source_index"], serde_json::json!(i));
    }

    ok(dir.path(), &["augment", "d.jsonl", "--seed", "1", "--out", "aug.jsonl"]);
    let aug = dataset::read(&dir.path().join("aug.jsonl")).unwrap();
    assert!(aug.iter().all(|r| r.meta["alpha"].as_f64().unwrap().abs() <= std::f64::consts::PI / 18.0));
    ok(dir.path(), &["stats", "d.jsonl", "--kinds", "anchor", "--out", "before.csv"]);
    ok(dir.path(), &["stats", "aug.jsonl", "--kinds", "anchor", "--out", "after.csv"]);
    let before = report::read(&dir.path().join("before.csv")).unwrap();
    let after = report::read(&dir.path().join("after.csv")).unwrap();
    assert_eq!(before.len(), after.len());
    for (b, a) in before.iter().zip(&after) {
        assert_eq!((&b.metric, &b.group, b.n), (&a.metric, &a.group, a.n));
        assert!((b.value - a.value).abs() < 1e-9, "{} {}", b.metric, b.group);
    }
}

#[test]
fn eval_noise_free_radial_is_perfect() {
    let dir = tempfile::tempdir().unwrap();
    ok(
        dir.path(),
        &[
            "gen",
            "--seed",
            "2",
            "--count",
            "150",
            "--mix",
            "1,0,0",
            "--noise-angle",
            "0",
            "--noise-radius",
            "0",
            "--out",
            "d.jsonl",
        ],
    );
    ok(
        dir.path(),
        &["eval", "d.jsonl", "--model", "anchor-radial", "--split", "kfold:5", "--runs", "5", "--out", "e.csv"],
    );
    let rows = report::read(&dir.path().join("e.csv")).unwrap();
    assert_eq!(value(&rows, "precision_mean", "anchor-radial", "kfold:5"), 1.0);
    assert_eq!(value(&rows, "precision_std", "anchor-radial", "kfold:5"), 0.0);
    let plans = std::fs::read_to_string(dir.path().join("e.csv.plans.jsonl")).unwrap();
    assert_eq!(plans.lines().count(), 5);
    for line in plans.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["sha256"].as_str().unwrap().len(), 64);
    }
    let models = std::fs::read_to_string(dir.path().join("e.csv.models.jsonl")).unwrap();
    assert_eq!(models.lines().count(), 25);
}

#[test]
fn eval_group_split_has_one_row_per_group() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["gen", "--seed", "4", "--count", "200", "--out", "d.jsonl"]);
    ok(
        dir.path(),
        &[
            "eval",
            "d.jsonl",
            "--model",
            "absolute-mean,anchor-radial",
            "--split",
            "group:surgery_type",
            "--out",
            "g.csv",
        ],
    );
    let rows = report::read(&dir.path().join("g.csv")).unwrap();
    let groups: std::collections::BTreeSet<&str> = rows
        .iter()
        .filter(|r| r.metric == "precision_mean" && r.representation == "anchor-radial")
        .map(|r| r.group.as_str())
        .collect();
    assert_eq!(
        groups.into_iter().collect::<Vec<_>>(),
        ["hemicolectomy_left", "hemicolectomy_right", "rectum", "sigmoid"]
    );
    ok(dir.path(), &["eval", "d.jsonl", "--split", "surgeon-groups", "--out", "s.csv"]);
}
