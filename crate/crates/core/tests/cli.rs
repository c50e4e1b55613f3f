//! End-to-end runs of the `densecap` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use densecap::cli::{execute, resolve, Command as Sub, ConfigFile, Flags};
use serde_json::Value;

fn densecap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_densecap")).args(args).env_remove("DENSECAP_SEED").output().unwrap()
}

/// The single run directory created under `out`.
fn run_dir(out: &Path) -> PathBuf {
    let dirs: Vec<PathBuf> = fs::read_dir(out).unwrap().map(|e| e.unwrap().path()).collect();
    assert_eq!(dirs.len(), 1, "expected one run directory in {}", out.display());
    dirs.into_iter().next().unwrap()
}

fn manifest(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

#[test]
fn dcc_run_writes_samples_summary_histogram_and_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().to_str().unwrap();
    let o = densecap(&["dcc", "--scenario", "1s1r", "--rank", "2", "--n", "200", "--seed", "7", "--out", out, "--quiet"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let dir = run_dir(tmp.path());
    assert!(dir.file_name().unwrap().to_str().unwrap().starts_with("dcc-"));
    for f in ["samples.jsonl", "summary.csv", "histogram.csv", "manifest.json"] {
        assert!(dir.join(f).is_file(), "missing {f}");
    }
    assert_eq!(fs::read_to_string(dir.join("samples.jsonl")).unwrap().lines().count(), 200);
    let m = manifest(&dir);
    assert_eq!(m["subcommand"], "dcc");
    assert_eq!(m["config"]["seed"], 7);
    assert_eq!(m["config"]["scenario"], "1s1r");
    assert!(m["error"].is_null());
    assert!(m["wall_time_seconds"].as_f64().unwrap() >= 0.0);
    // The human-readable summary goes to standard output.
    assert!(!o.stdout.is_empty());
}

#[test]
fn fidelity_rank_five_is_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let o = densecap(&["tf", "--rank", "5", "--out", tmp.path().to_str().unwrap()]);
    assert!(!o.status.success());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("rank"));
}

#[test]
fn invalid_combinations_are_rejected_before_any_output() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().to_str().unwrap();
    for args in [
        vec!["tf", "--scenario", "2s1r"],
        vec!["envelope", "--scenario", "2s2r"],
        vec!["dcc", "--scenario", "2s1r", "--rank", "7"],
        vec!["dcc", "--acting", "everyone"],
        vec!["postpovm-bound", "--acting", "none"],
        vec!["dcc", "--workers", "0"],
    ] {
        let mut full = args.clone();
        full.extend(["--out", out]);
        let o = densecap(&full);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
    }
    assert_eq!(fs::read_dir(tmp.path()).unwrap().count(), 0);
}

#[test]
fn flags_override_the_config_file_and_the_manifest_records_both() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.json");
    fs::write(&cfg, r#"{"seed": 11, "n": 30, "rank": [1, 2]}"#).unwrap();
    let out = tmp.path().join("out");
    let o = densecap(&[
        "dcc",
        "--config",
        cfg.to_str().unwrap(),
        "--seed",
        "99",
        "--out",
        out.to_str().unwrap(),
        "--quiet",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let m = manifest(&run_dir(&out));
    assert_eq!(m["config"]["seed"], 99);
    assert_eq!(m["config"]["seed_source"], "flag");
    assert_eq!(m["config"]["n_samples"], 30);
    assert_eq!(m["config"]["ranks"], serde_json::json!([1, 2]));
    assert_eq!(m["config_file"]["seed"], 11);
}

#[test]
fn environment_seed_is_a_fallback() {
    let tmp = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_densecap"))
        .args(["meandcc", "--n", "50", "--quiet", "--out", tmp.path().to_str().unwrap()])
        .env("DENSECAP_SEED", "1234")
        .output()
        .unwrap();
    assert!(o.status.success());
    let m = manifest(&run_dir(tmp.path()));
    assert_eq!(m["config"]["seed"], 1234);
    assert_eq!(m["config"]["seed_source"], "env");
}

#[test]
fn unknown_config_keys_are_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.json");
    fs::write(&cfg, r#"{"seed": 1, "colour": "blue"}"#).unwrap();
    let o = densecap(&["dcc", "--config", cfg.to_str().unwrap(), "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("colour"));
}

#[test]
fn data_files_do_not_depend_on_the_worker_count() {
    let tmp = tempfile::tempdir().unwrap();
    let run = |workers: &str| {
        let out = tmp.path().join(format!("w{workers}"));
        let o = densecap(&[
            "dcc", "--scenario", "2s1r", "--rank", "2,3", "--n", "40", "--acting", "both", "--starts", "2", "--iters",
            "60", "--seed", "5", "--workers", workers, "--out", out.to_str().unwrap(), "--quiet",
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        run_dir(&out)
    };
    let (a, b) = (run("1"), run("8"));
    for f in ["samples.jsonl", "summary.csv", "histogram.csv"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f} differs");
    }
}

#[test]
fn every_subcommand_writes_its_files() {
    let tmp = tempfile::tempdir().unwrap();
    let cases: [(&[&str], &[&str]); 6] = [
        (&["tf", "--rank", "1", "--n", "20"], &["samples.jsonl", "summary.csv", "histogram.csv"]),
        (&["envelope", "--rank", "1,2", "--n", "20", "--grid", "5"], &["scatter.csv", "checks.json"]),
        (&["theorem1", "--sweeps", "200"], &["report.json"]),
        (&["theorem2", "--sweeps", "200"], &["report.json"]),
        (&["meandcc", "--n", "50"], &["table1.csv", "meandcc.json"]),
        (&["propcheck", "--n", "10", "--starts", "2", "--iters", "40"], &["samples.jsonl", "report.json"]),
    ];
    for (i, (args, files)) in cases.iter().enumerate() {
        let out = tmp.path().join(i.to_string());
        let mut full = args.to_vec();
        full.extend(["--out", out.to_str().unwrap(), "--quiet"]);
        let o = densecap(&full);
        assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        let dir = run_dir(&out);
        for f in files.iter().chain(&["manifest.json"]) {
            assert!(dir.join(f).is_file(), "{args:?}: missing {f}");
        }
    }
    let out = tmp.path().join("pp");
    let o = densecap(&["postpovm-bound", "--n", "5", "--starts", "2", "--iters", "40", "--out", out.to_str().unwrap(), "--quiet"]);
    assert!(o.status.success());
    assert!(run_dir(&out).join("points.csv").is_file());
}

#[test]
fn repeated_runs_get_distinct_directories() {
    let tmp = tempfile::tempdir().unwrap();
    for _ in 0..2 {
        assert!(densecap(&["theorem2", "--sweeps", "10", "--quiet", "--out", tmp.path().to_str().unwrap()]).status.success());
    }
    assert_eq!(fs::read_dir(tmp.path()).unwrap().count(), 2);
}

#[test]
fn manifest_is_written_when_a_run_fails() {
    let tmp = tempfile::tempdir().unwrap();
    let flags = Flags { out: Some(tmp.path().to_path_buf()), n: Some(3), quiet: true, ..Flags::default() };
    let mut cfg = resolve(Sub::Dcc, &flags, &ConfigFile::default(), None).unwrap();
    // Bypass validation to force a failure inside the runner.
    cfg.ranks = vec![9];
    assert!(execute(&cfg, &ConfigFile::default()).is_err());
    let m = manifest(&run_dir(tmp.path()));
    assert!(m["error"].as_str().unwrap().contains("rank"));
}
