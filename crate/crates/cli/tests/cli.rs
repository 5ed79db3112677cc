mod common;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use common::example;

fn run(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_el-abduct"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut pipe = child.stdin.take().unwrap();
    pipe.write_all(stdin.unwrap_or_default().as_bytes())
        .unwrap();
    drop(pipe);
    child.wait_with_output().unwrap()
}

fn path(file: &str) -> String {
    example(file).to_string_lossy().into_owned()
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn exit_codes() {
    let ok = run(&["abduce", "-i", &path("cyclic.abd")], None);
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("hypotheses: 3"));

    let parse = run(&["abduce"], Some("tbox {\n  A SubClassOf\n}\n"));
    assert_eq!(parse.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&parse.stderr).contains("line 2, column 15"));

    let entailed = "tbox {\n  A SubClassOf B\n}\nobservation: A SubClassOf B\nabducibles: all\n";
    assert_eq!(run(&["abduce"], Some(entailed)).status.code(), Some(2));

    let none = "tbox {\n  A SubClassOf B\n}\nobservation: A SubClassOf C\nabducibles: C\n";
    assert_eq!(run(&["abduce"], Some(none)).status.code(), Some(3));
}

#[test]
fn json_output_trace_and_flags() {
    let trace = scratch("academia.trace");
    let out = run(
        &[
            "abduce",
            "-i",
            &path("academia.abd"),
            "--format",
            "json",
            "--no-modules",
            "--no-presaturation",
            "--depth-bound",
            "3",
            "--soft-timeout",
            "20",
            "--hard-timeout",
            "none",
            "--verify",
            "--trace",
            trace.to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(out.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["depth_bound"], 3);
    assert_eq!(json["computed_depth_bound"], 182);
    assert_eq!(json["hypotheses"].as_array().unwrap().len(), 2);
    assert!(json["stats"]["phase_ms"].get("presaturate").is_none());
    assert_eq!(json["hypotheses"][1]["verification"]["solution"], true);
    assert!(!fs::read_to_string(&trace).unwrap().trim().is_empty());
}

#[test]
fn file_options_apply_and_flags_override() {
    let text =
        fs::read_to_string(example("academia.abd")).unwrap() + "options {\n  depth_bound: 5\n}\n";
    let json = |args: &[&str]| -> serde_json::Value {
        let out = run(args, Some(&text));
        serde_json::from_slice(&out.stdout).unwrap()
    };
    assert_eq!(json(&["abduce", "--format", "json"])["depth_bound"], 5);
    assert_eq!(
        json(&["abduce", "--format", "json", "--depth-bound", "7"])["depth_bound"],
        7
    );
}

#[test]
fn classify_prints_subsumptions() {
    let out = run(&["classify", "-i", &path("lion.abd")], None);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(
        text.lines().collect::<Vec<_>>(),
        [
            "House SubClassOf Building",
            "Lion SubClassOf Felidae",
            "Mammal SubClassOf Animal"
        ]
    );
}

#[test]
fn bench_round_trip() {
    let corpus = scratch("academia.jsonl");
    let gen = run(
        &[
            "bench-gen",
            "-i",
            &path("academia.abd"),
            "--count",
            "2",
            "--family",
            "origin",
            "--family",
            "repair",
            "-o",
            corpus.to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(gen.status.code(), Some(0));
    assert_eq!(fs::read_to_string(&corpus).unwrap().lines().count(), 4);
    let table = run(
        &[
            "bench-run",
            "-i",
            corpus.to_str().unwrap(),
            "--threads",
            "2",
        ],
        None,
    );
    assert_eq!(table.status.code(), Some(0));
    let text = String::from_utf8(table.stdout).unwrap();
    let families: Vec<_> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap())
        .collect();
    assert_eq!(families, ["ORIGIN", "REPAIR"]);
}
