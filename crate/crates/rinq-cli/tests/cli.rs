//! End-to-end tests of the `rinq` binary: subcommand behavior, exit codes,
//! and the byte-determinism contract.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn rinq() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rinq"))
}

fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/pdb")
}

fn fixture(name: &str) -> String {
    fixture_dir().join(name).to_string_lossy().into_owned()
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn compare_is_byte_deterministic() {
    let run = || {
        rinq()
            .args([
                "compare",
                &fixture("1XY1.pdb"),
                "--measure",
                "eigenvector",
                "--tau",
                "5",
                "--seed",
                "7",
                "--reads",
                "500",
                "--sweeps",
                "200",
                "--format",
                "json",
            ])
            .output()
            .unwrap()
    };
    let first = run();
    let second = run();
    assert!(first.status.success(), "{}", String::from_utf8_lossy(&first.stderr));
    assert_eq!(first.stdout, second.stdout);
    assert!(!first.stdout.is_empty());
}

#[test]
fn compare_by_id_resolves_through_cache() {
    // spec-style invocation with the id instead of a path; the warm cache
    // stands in for the network
    let out = rinq()
        .env("RINQ_CACHE_DIR", fixture_dir())
        .args([
            "compare", "1XY1", "--measure", "eigenvector", "--tau", "5", "--seed", "7",
            "--reads", "2000", "--sweeps", "150", "--format", "json",
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(doc["pdb_id"], "1XY1");
    assert_eq!(doc["jaccard"], 1.0);
    assert_eq!(doc["n"], 9);
}

#[test]
fn solve_estrada_selects_residue_six() {
    let out = rinq()
        .args([
            "solve",
            &fixture("1XY1.pdb"),
            "--measure",
            "estrada",
            "--tau",
            "1",
            "--p1",
            "450",
            "--seed",
            "7",
            "--reads",
            "500",
            "--sweeps",
            "200",
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(doc["indices"], serde_json::json!([5]));
    assert_eq!(doc["labels"][0], "A:6:CYS");
}

#[test]
fn graph_missing_file_exits_2_with_stage_label() {
    let out = rinq().args(["graph", "missing.pdb"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("[input]"), "stderr: {err}");
}

#[test]
fn unknown_flag_exits_1() {
    let out = rinq()
        .args(["solve", "whatever", "--no-such-flag"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bad_measure_exits_1() {
    let out = rinq()
        .args(["centrality", &fixture("1XY1.pdb"), "--measure", "bogus"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown measure"));
}

#[test]
fn no_valid_sample_exits_3() {
    // the mixed formulation with the default penalty leaks through the
    // popcount wall on this dense peptide: no read ends at popcount 5
    let out = rinq()
        .args([
            "solve",
            &fixture("2N08.pdb"),
            "--measure",
            "eigenvector",
            "--formulation",
            "mixed",
            "--tau",
            "5",
            "--seed",
            "7",
            "--reads",
            "200",
            "--sweeps",
            "150",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no valid sample"));
}

#[test]
fn graph_formats_and_scores() {
    let dot = rinq()
        .args([
            "graph",
            &fixture("1XY1.pdb"),
            "--format",
            "dot",
            "--scores",
            "eigenvector",
        ])
        .output()
        .unwrap();
    assert!(dot.status.success());
    let text = stdout_of(&dot);
    assert_eq!(text.matches(" -- ").count(), 23);
    assert_eq!(text.matches("score=").count(), 9);

    let json = rinq()
        .args(["graph", &fixture("1XY1.pdb"), "--format", "json"])
        .output()
        .unwrap();
    let doc: serde_json::Value = serde_json::from_str(&stdout_of(&json)).unwrap();
    assert_eq!(doc["nodes"].as_array().unwrap().len(), 9);
    assert_eq!(doc["edges"].as_array().unwrap().len(), 23);
    assert_eq!(doc["cutoff"], 8.0);
}

#[test]
fn centrality_csv_has_nine_rows() {
    let out = rinq()
        .args([
            "centrality",
            &fixture("1XY1.pdb"),
            "--measure",
            "estrada",
            "--format",
            "csv",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = stdout_of(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("index,chain,res_seq,res_name,score"));
    assert_eq!(lines.count(), 9);
}

#[test]
fn fetch_warm_cache_prints_path_without_network() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::copy(fixture_dir().join("1XY1.pdb"), dir.path().join("1XY1.pdb")).unwrap();
    let out = rinq()
        .args(["fetch", "1xy1", "--cache-dir"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout_of(&out).trim().ends_with("1XY1.pdb"));
}

#[test]
fn fetch_invalid_id_fails() {
    let out = rinq().args(["fetch", "XY"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("invalid PDB id"));
}

#[test]
fn corpus_emits_rows_in_manifest_order() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("peptides.txt");
    std::fs::write(
        &manifest,
        format!(
            "# compact peptides\n{}\n{} tau=3\n{} measure=estrada tau=1 p1=650\n",
            fixture("1XY1.pdb"),
            fixture("2N08.pdb"),
            fixture("6A5J.pdb"),
        ),
    )
    .unwrap();
    let out = rinq()
        .args([
            "corpus",
            manifest.to_str().unwrap(),
            "--seed",
            "7",
            "--reads",
            "2000",
            "--sweeps",
            "150",
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout_of(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[0].starts_with("pdb_id,"));
    assert!(lines[1].starts_with("1XY1,9,23,eigenvector,"));
    assert!(lines[2].starts_with("2N08,11,37,eigenvector,"));
    assert!(lines[3].starts_with("6A5J,13,44,estrada,"));
    // 1XY1 at tau=5 agrees perfectly with the classical ranking
    assert!(lines[1].contains(",1.000,"), "row: {}", lines[1]);
}

#[test]
fn solve_dump_qubo_writes_coo_csv() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("q.csv");
    let out = rinq()
        .args([
            "solve",
            &fixture("1XY1.pdb"),
            "--tau",
            "5",
            "--reads",
            "200",
            "--sweeps",
            "100",
            "--dump-qubo",
        ])
        .arg(&dump)
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = std::fs::read_to_string(&dump).unwrap();
    assert!(text.starts_with("i,j,q\n"));
    // dense 9×9 symmetric upper triangle with diagonal: 45 entries
    assert_eq!(text.lines().count(), 46);
}
