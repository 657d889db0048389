use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

mod common;

fn fixtures() -> Vec<PathBuf> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    ["happiness", "population", "stores", "expectancy"]
        .iter()
        .map(|n| dir.join(format!("{n}.csv")))
        .collect()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_joinscout"))
        .args(args)
        .env("RUST_LOG", "warn")
        .env_remove("JOINSCOUT_PARAMS")
        .output()
        .unwrap()
}

fn ok(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Ground truth, store and a small model over the toy fixtures plus a few
/// synthetic datasets.
fn pipeline(dir: &Path, seed: &str) -> (PathBuf, PathBuf, PathBuf) {
    let synthetic = common::corpus(&common::CorpusConfig { datasets: 8, ..Default::default() });
    let mut inputs = fixtures();
    inputs.extend(common::write_csvs(&synthetic, dir));
    let inputs: Vec<&str> = inputs.iter().map(|p| s(p)).collect();
    let (gt, store, model) = (dir.join("gt.csv"), dir.join("store.json"), dir.join("model.json"));
    ok(&[&["ground-truth"][..], &inputs, &["-o", s(&gt)]].concat());
    ok(&[&["index"][..], &inputs, &["-o", s(&store)]].concat());
    ok(&["train", s(&gt), s(&store), "-o", s(&model), "--seed", seed, "--epochs", "40"]);
    (gt, store, model)
}

#[test]
fn toy_pipeline_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let (gt, store, model) = pipeline(dir.path(), "7");

    let header = std::fs::read_to_string(&gt).unwrap();
    assert_eq!(
        header.lines().next().unwrap(),
        "dataset_a,attribute_a,dataset_b,attribute_b,containment,jaccard,k,level,q_relaxed,q_balanced,q_strict"
    );

    let ranking = ok(&["discover", "--store", s(&store), "--model", s(&model), "-q", "happiness.Country", "-k", "3"]);
    let candidates = ranking.as_array().unwrap();
    assert!(!candidates.is_empty() && candidates.len() <= 3);
    assert!(candidates.iter().all(|c| c["dataset"] != "happiness"));
    let scores: Vec<f64> = candidates.iter().map(|c| c["score"].as_f64().unwrap()).collect();
    assert!(scores.windows(2).all(|w| w[0] >= w[1]));

    let report = ok(&["evaluate", s(&gt), "--metric", "C", "--threshold", "0.5"]);
    assert!(report["f_score"].as_f64().is_some());
}

#[test]
fn training_is_deterministic_per_seed() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let (_, _, ma) = pipeline(a.path(), "7");
    let (_, _, mb) = pipeline(b.path(), "7");
    assert_eq!(std::fs::read(ma).unwrap(), std::fs::read(mb).unwrap());
}

#[test]
fn re_indexing_bumps_store_version() {
    let dir = tempfile::tempdir().unwrap();
    let inputs = fixtures();
    let (v1, v2) = (dir.path().join("v1.json"), dir.path().join("v2.json"));
    ok(&["index", s(&inputs[0]), s(&inputs[1]), "-o", s(&v1)]);
    ok(&["index", s(&inputs[1]), s(&inputs[2]), "--base", s(&v1), "-o", s(&v2)]);
    let read = |p: &Path| -> Value { serde_json::from_slice(&std::fs::read(p).unwrap()).unwrap() };
    let (first, second) = (read(&v1), read(&v2));
    assert_eq!(second["version"].as_u64().unwrap(), first["version"].as_u64().unwrap() + 1);
    assert!(second["profiles"].as_array().unwrap().len() > first["profiles"].as_array().unwrap().len());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.csv");
    assert_eq!(run(&["ground-truth", s(&missing), "-o", s(&dir.path().join("gt.csv"))]).status.code(), Some(1));
    assert_eq!(run(&["discover", "--store", "x", "--model", "y", "-q", "a.b", "-k", "0"]).status.code(), Some(2));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));

    let (_, store, model) = pipeline(dir.path(), "1");
    let out = run(&["discover", "--store", s(&store), "--model", s(&model), "-q", "happiness.Nope"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Nope"));
}
