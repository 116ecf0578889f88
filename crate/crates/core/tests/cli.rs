use std::process::{Command, Output};

use patseq::record::{Record, Status};
use sha2::{Digest, Sha256};

fn patseq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_patseq"))
        .args(args)
        .env_remove("PATSEQ_MODE")
        .env_remove("PATSEQ_FORMAT")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn solve_prints_pattern_and_continuation() {
    let o = patseq(&["solve", "1, 3, 5, 7, 9, 11"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("pattern   BAS"), "{out}");
    assert!(out.contains("13, 15, 17, 19, 21"), "{out}");
}

#[test]
fn modes_agree_on_arithmetic_series() {
    let json = |mode: &str| {
        let o = patseq(&["--mode", mode, "--format", "json", "solve", "1,3,5,7,9,11"]);
        serde_json::from_str::<Record>(stdout(&o).trim()).unwrap()
    };
    let (s, n) = (json("S1Z"), json("N2Z"));
    assert_eq!(s.kitas, n.kitas);
    assert_eq!(s.predicted, n.predicted);
}

#[test]
fn structured_output_round_trips() {
    let o = patseq(&["--format", "json", "--count", "2", "solve", "3 3 6 18 72"]);
    let line = stdout(&o);
    let r: Record = serde_json::from_str(line.trim()).unwrap();
    assert_eq!(r.status, Status::Solved);
    assert_eq!(r.predicted, ["360", "2160"]);
    assert_eq!(r.to_json_line(), line.trim());
}

#[test]
fn exit_codes() {
    assert_eq!(patseq(&["solve", "1, 2"]).status.code(), Some(3));
    assert_eq!(patseq(&["solve", "1, two, 3"]).status.code(), Some(3));
    assert_eq!(patseq(&["solve", "5, 9, 35, 125, 345"]).status.code(), Some(2));
    let o = patseq(&["--budget-states", "3", "solve", "3, 1, 4, 1, 5, 9, 2, 6, 5, 3"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn environment_mirrors_flags() {
    let o = Command::new(env!("CARGO_BIN_EXE_patseq"))
        .args(["solve", "2 4 8 16 32"])
        .env("PATSEQ_FORMAT", "json")
        .env("PATSEQ_COUNT", "1")
        .output()
        .unwrap();
    let r: Record = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(r.predicted, ["64"]);
}

#[test]
fn predict_and_truncation_marker() {
    let o = patseq(&["--count", "3", "predict", "3, 5, 8, 13, 21, 34"]);
    assert_eq!(stdout(&o).trim(), "55, 89, 144");
    let dir = tempfile::tempdir().unwrap();
    let cat = dir.path().join("mirror.txt");
    std::fs::write(&cat, "# mirror only\nBAS\nSSYM\n").unwrap();
    let o = patseq(&["--catalog", cat.to_str().unwrap(), "--count", "5", "predict", "1 2 4 8 4"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).trim().ends_with("..."), "{}", stdout(&o));
}

#[test]
fn explain_and_catalog() {
    let o = patseq(&["explain", "2, 4, 8, 16, 32"]);
    let out = stdout(&o);
    assert!(out.contains("level 1: DIV"), "{out}");
    assert!(out.contains("solved, constant from row 2"), "{out}");
    let o = patseq(&["--catalog", "oeis-deep", "catalog"]);
    assert_eq!(stdout(&o).lines().next(), Some("BAS"));
}

#[test]
fn batch_report_and_threshold() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("c.txt");
    std::fs::write(&corpus, "A000001 ,1,2,3,4,5,\nA000002 ,1,4,9,16,25,\nA000003 ,3,1,4,1,5,9,2,\n").unwrap();
    let report = dir.path().join("r.json");
    let records = dir.path().join("r.jsonl");
    let o = patseq(&[
        "--depth",
        "1",
        "batch",
        corpus.to_str().unwrap(),
        "--report",
        report.to_str().unwrap(),
        "--records",
        records.to_str().unwrap(),
        "--min-solve-rate",
        "90",
    ]);
    assert_eq!(o.status.code(), Some(5));
    assert!(stdout(&o).contains("solved 2/3"), "{}", stdout(&o));
    let rep: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(rep["solved"], 2);
    assert_eq!(std::fs::read_to_string(&records).unwrap().lines().count(), 3);
}

#[test]
fn builtin_data_unchanged() {
    let digest = |text: &str| format!("{:x}", Sha256::digest(text.as_bytes()));
    assert_eq!(
        digest(include_str!("../data/iq.txt")),
        "00d53da3885d2c0a12b370580eb7706669e321478ddc3eff1a6f6c081d3f60c4"
    );
    assert_eq!(
        digest(include_str!("../data/literature.txt")),
        "e09941e4ea5e7367f9d3632e2937f5a2fd9e31ee07d8a2b2cc0b2773c10574c0"
    );
}
