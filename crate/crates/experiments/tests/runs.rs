use std::path::{Path, PathBuf};

use fairrank_experiments::exp3::{self, Exp3Params};
use fairrank_experiments::german::GermanFormat;
use fairrank_experiments::{ingest_german_credit, run_manifest, write_outputs, Manifest};

fn repo_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn small_manifest(kind: &str, params: &str, out: &Path) -> Manifest {
    let text = format!(
        r#"{{"experiment": "{kind}", "seed": 9, "bootstrap_resamples": 200,
            "output_dir": {out:?}, "params": {params}}}"#
    );
    Manifest::from_json(&text).unwrap().with_base_dir(repo_root())
}

fn run_twice(kind: &str, params: &str) {
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    let mut files = Vec::new();
    for d in &dirs {
        let m = small_manifest(kind, params, d.path());
        let out = run_manifest(&m).unwrap();
        assert!(out.num_records() > 0);
        files.push(write_outputs(&m, &out).unwrap());
    }
    assert_eq!(files[0].len(), 4);
    for (a, b) in files[0].iter().zip(&files[1]) {
        assert_eq!(a.file_name(), b.file_name());
        // the manifest echo embeds the output directory
        if a.to_string_lossy().ends_with(".manifest.json") {
            continue;
        }
        let (x, y) = (std::fs::read_to_string(a).unwrap(), std::fs::read_to_string(b).unwrap());
        assert!(x == y, "{a:?} differs");
    }
}

#[test]
fn exp1_outputs_are_byte_identical_across_runs() {
    run_twice("exp1-ii", r#"{"depths": [0, 5], "thetas": [0.5, 2.0], "samples": 300}"#);
}

#[test]
fn exp2_outputs_are_byte_identical_across_runs() {
    run_twice("exp2-ndcg", r#"{"deltas": [0.0, 1.0], "thetas": [1.0], "instances": 5, "samples": 20}"#);
}

#[test]
fn exp3_outputs_are_byte_identical_across_runs() {
    run_twice("exp3-german", r#"{"sizes": [10, 30], "repetitions": 3}"#);
}

#[test]
fn csv_header_and_manifest_echo() {
    let dir = tempfile::tempdir().unwrap();
    let m = small_manifest("exp1-ii", r#"{"depths": [3], "thetas": [1.0], "samples": 50}"#, dir.path());
    let out = run_manifest(&m).unwrap();
    write_outputs(&m, &out).unwrap();
    let csv = std::fs::read_to_string(dir.path().join("exp1-ii.csv")).unwrap();
    assert_eq!(
        csv.lines().next().unwrap(),
        "experiment,center,size,delta,theta,sigma,algorithm,metric,point,ci_lo,ci_hi"
    );
    assert_eq!(csv.lines().count(), 3);
    let echo: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("exp1-ii.manifest.json")).unwrap()).unwrap();
    assert_eq!(echo["sha256"], m.hash());
    assert_eq!(echo["manifest"]["seed"], 9);
    let raw = std::fs::read_to_string(dir.path().join("exp1-ii.raw.jsonl")).unwrap();
    assert_eq!(raw.lines().count(), 50);
}

#[test]
fn exp3_center_is_sex_age_fair_and_subsets_follow_it() {
    let data = ingest_german_credit(repo_root().join("data/german_credit.csv"), &GermanFormat::default()).unwrap();
    let params = Exp3Params {
        sizes: vec![20],
        repetitions: 2,
        ..Exp3Params::default()
    };
    let out = exp3::run(&params, &data, 1, 100).unwrap();
    let spec = exp3::sex_age_spec(&params, &data).unwrap();
    assert!(fairrank::metrics::is_fair(&out.center, &data.sex_age, &spec).unwrap());
    let exact = out
        .records
        .iter()
        .find(|r| r.algorithm == "exact-fair-dcg" && r.sigma == Some(0.0))
        .unwrap();
    let mut ids = exact.ranking.clone().unwrap();
    ids.sort();
    let mut top: Vec<String> = out.center.order()[..20]
        .iter()
        .map(|&c| data.candidates.get(c).unwrap().id.clone())
        .collect();
    top.sort();
    assert_eq!(ids, top);
}

#[test]
fn missing_dataset_is_a_data_error() {
    let m = small_manifest("exp3-german", r#"{"data": "nowhere.csv"}"#, Path::new("/tmp"));
    let err = run_manifest(&m).unwrap_err();
    assert!(err.to_string().contains("nowhere.csv"), "{err}");
}
