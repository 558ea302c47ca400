use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn data(rel: &str) -> String {
    format!("{}/data/{rel}", env!("CARGO_MANIFEST_DIR"))
}

fn texfair(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_texfair"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(out: &Output) -> String {
    assert!(
        out.status.success(),
        "exit {:?}\nstdout:\n{}\nstderr:\n{}",
        out.status.code(),
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

struct Fixture {
    dir: TempDir,
    index: PathBuf,
}

fn figure_one_index() -> Fixture {
    let dir = tempfile::tempdir().unwrap();
    let index = dir.path().join("fig1.idx");
    let out = texfair(&[
        "index",
        "--collection",
        &data("figure1/collection.tsv"),
        "--lexicon",
        &data("figure1/lexicon.json"),
        "--out",
        p(&index),
    ]);
    assert!(ok(&out).contains("indexed 11 documents"));
    Fixture { dir, index }
}

fn evaluate(fx: &Fixture, out: &Path, extra: &[&str]) -> String {
    let [left, right, lexicon, qrels] =
        ["figure1/left.run", "figure1/right.run", "figure1/lexicon.json", "figure1/qrels.txt"].map(data);
    let mut args = vec![
        "evaluate",
        "--run",
        &left,
        "--run",
        &right,
        "--index",
        p(&fx.index),
        "--lexicon",
        &lexicon,
        "--qrels",
        &qrels,
        "--out",
        p(out),
    ];
    args.extend_from_slice(extra);
    ok(&texfair(&args))
}

#[test]
fn evaluate_two_rankings() {
    let fx = figure_one_index();
    let out = fx.dir.path().join("eval");
    let summary = evaluate(&fx, &out, &[]);
    let rows: Vec<Vec<&str>> = summary.lines().skip(2).map(|l| l.split_whitespace().collect()).collect();
    assert_eq!(rows.len(), 2, "{summary}");
    assert_eq!(&rows[0][..4], ["left", "1", "0.0000", "0.8830"]);
    assert_eq!(&rows[1][..4], ["right", "1", "0.0000", "0.0000"]);
    // mrr: first relevant at rank 1 in left, none in right
    assert_eq!(rows[0][6], "1.0000");
    assert_eq!(rows[1][6], "0.0000");

    let csv = std::fs::read_to_string(out.join("per_query.csv")).unwrap();
    let header: Vec<&str> = csv.lines().next().unwrap().split(',').collect();
    assert_eq!(&header[..2], ["run", "qid"]);
    assert!(header.contains(&"p_female") && header.contains(&"p_male"));
    assert_eq!(csv.lines().count(), 3);

    let stats: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("stats.json")).unwrap()).unwrap();
    assert_eq!(stats["config"]["fairness"]["k"], 10);
    assert_eq!(stats["config"]["background"], "whole index");
    // a paired test needs two queries
    assert_eq!(stats["comparisons"].as_array().map(Vec::len), Some(0));
}

#[test]
fn two_runs_are_compared() {
    let fx = figure_one_index();
    let a = fx.dir.path().join("a.run");
    let b = fx.dir.path().join("b.run");
    std::fs::write(&a, "q1 Q0 m1 1 3 a\nq1 Q0 f1 2 2 a\nq2 Q0 n1 1 3 a\nq2 Q0 f2 2 2 a\nq3 Q0 m2 1 1 a\n").unwrap();
    std::fs::write(&b, "q1 Q0 m3 1 3 b\nq1 Q0 m4 2 2 b\nq2 Q0 m5 1 3 b\nq2 Q0 f1 2 2 b\nq3 Q0 n2 1 1 b\n").unwrap();
    let out = fx.dir.path().join("cmp");
    let lexicon = data("figure1/lexicon.json");
    ok(&texfair(&[
        "evaluate", "--run", p(&a), "--run", p(&b), "--index", p(&fx.index), "--lexicon", &lexicon, "--out", p(&out),
    ]));
    let stats: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("stats.json")).unwrap()).unwrap();
    let comparisons = stats["comparisons"].as_array().unwrap();
    assert!(!comparisons.is_empty());
    for c in comparisons {
        assert_eq!(c["run_a"], "a");
        assert_eq!(c["run_b"], "b");
        assert_eq!(c["test"]["n"], 3);
    }
    assert!(stats["runs"]["a"]["aggregates"]["texfair"]["mean"].is_number());
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let fx = figure_one_index();
    let a = fx.dir.path().join("a");
    let b = fx.dir.path().join("b");
    evaluate(&fx, &a, &[]);
    evaluate(&fx, &b, &[]);
    for f in ["per_query.csv", "stats.json"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn flags_override_config_file() {
    let fx = figure_one_index();
    let config = fx.dir.path().join("settings.toml");
    std::fs::write(&config, "k = 2\ntau = 1\n").unwrap();
    let out = fx.dir.path().join("cfg");
    evaluate(&fx, &out, &["--config", p(&config), "--k", "3"]);
    let stats: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("stats.json")).unwrap()).unwrap();
    assert_eq!(stats["config"]["fairness"]["k"], 3);
    assert_eq!(stats["config"]["fairness"]["tau"], 1);

    std::fs::write(&config, "k = 2\ncutoff = 4\n").unwrap();
    let bad = texfair(&[
        "--config",
        p(&config),
        "sweep",
        "--run",
        &data("figure1/left.run"),
        "--index",
        p(&fx.index),
        "--lexicon",
        &data("figure1/lexicon.json"),
        "--out",
        p(&out),
    ]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn duplicate_document_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let collection = dir.path().join("dup.tsv");
    std::fs::write(&collection, "a\the ran\nb\tshe ran\na\tagain\n").unwrap();
    let out = texfair(&[
        "index",
        "--collection",
        p(&collection),
        "--lexicon",
        &data("gender_lexicon.json"),
        "--out",
        p(&dir.path().join("x.idx")),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("\"a\""));
}

#[test]
fn unknown_ranked_document_is_a_validation_error() {
    let fx = figure_one_index();
    let run = fx.dir.path().join("bad.run");
    std::fs::write(&run, "q1 Q0 m1 1 2.0 bad\nq1 Q0 ghost7 2 1.0 bad\n").unwrap();
    let out = texfair(&[
        "evaluate",
        "--run",
        p(&run),
        "--index",
        p(&fx.index),
        "--lexicon",
        &data("figure1/lexicon.json"),
        "--out",
        p(&fx.dir.path().join("o")),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("ghost7"));
}

#[test]
fn missing_input_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = texfair(&[
        "index",
        "--collection",
        p(&dir.path().join("nope.tsv")),
        "--lexicon",
        &data("gender_lexicon.json"),
        "--out",
        p(&dir.path().join("x.idx")),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nope.tsv"));
}

#[test]
fn lexicon_mismatch_is_rejected() {
    let fx = figure_one_index();
    let other = fx.dir.path().join("other.json");
    std::fs::write(&other, r#"{"groups": {"a": ["x"], "b": ["y"]}}"#).unwrap();
    let out = texfair(&[
        "sweep",
        "--run",
        &data("figure1/left.run"),
        "--index",
        p(&fx.index),
        "--lexicon",
        p(&other),
        "--out",
        p(&fx.dir.path().join("o")),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn cds_round_trip_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let once = dir.path().join("cf.tsv");
    let twice = dir.path().join("cf2.tsv");
    let mapping = PathBuf::from(data("gender_cds.tsv"));
    let stdout = ok(&texfair(&[
        "cds",
        "--collection",
        &data("figure1/collection.tsv"),
        "--mapping",
        p(&mapping),
        "--out",
        p(&once),
    ]));
    assert!(stdout.contains("substitutions"));
    let swapped = std::fs::read_to_string(&once).unwrap();
    assert!(swapped.starts_with("m1\tshe scored twice"));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("cf.tsv.report.json")).unwrap()).unwrap();
    assert_eq!(report["he->she"], 1);

    ok(&texfair(&[
        "cds",
        "--collection",
        p(&once),
        "--mapping",
        p(&mapping),
        "--out",
        p(&twice),
        "--report",
        p(&dir.path().join("r.json")),
    ]));
    assert_eq!(
        std::fs::read_to_string(&twice).unwrap(),
        std::fs::read_to_string(data("figure1/collection.tsv")).unwrap()
    );
}

#[test]
fn crbo_of_identical_runs_is_one() {
    let dir = tempfile::tempdir().unwrap();
    let stdout = ok(&texfair(&[
        "crbo",
        "--original",
        &data("figure1/left.run"),
        "--counterfactual",
        &data("figure1/left.run"),
        "--out",
        p(dir.path()),
    ]));
    assert!(stdout.contains("1.0000"), "{stdout}");
    assert_eq!(std::fs::read_to_string(dir.path().join("crbo.csv")).unwrap(), "qid,rbo\nq1,1\n");

    let disjoint = ok(&texfair(&[
        "crbo",
        "--original",
        &data("figure1/left.run"),
        "--counterfactual",
        &data("figure1/right.run"),
        "--variant",
        "truncated",
        "--out",
        p(dir.path()),
    ]));
    assert!(disjoint.contains("truncated") && disjoint.contains("0.0000"), "{disjoint}");
}

#[test]
fn sweep_writes_one_row_per_cutoff() {
    let fx = figure_one_index();
    let out = fx.dir.path().join("sweep");
    let stdout = ok(&texfair(&[
        "sweep",
        "--run",
        &data("figure1/left.run"),
        "--index",
        p(&fx.index),
        "--lexicon",
        &data("figure1/lexicon.json"),
        "--ks",
        "1,2,4",
        "--out",
        p(&out),
    ]));
    let csv = std::fs::read_to_string(out.join("sweep.csv")).unwrap();
    assert_eq!(stdout, csv);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "k,nfairr,texfair,texfair_no_rbdf,queries");
    assert_eq!(lines.len(), 4);
    // one male document: representation all male
    assert!(lines[1].starts_with("1,0,0,0,1"), "{}", lines[1]);
}

#[test]
fn worker_count_from_environment() {
    let fx = figure_one_index();
    let run = |workers: &str| {
        Command::new(env!("CARGO_BIN_EXE_texfair"))
            .env("TEXFAIR_WORKERS", workers)
            .args([
                "sweep",
                "--run",
                &data("figure1/left.run"),
                "--index",
                p(&fx.index),
                "--lexicon",
                &data("figure1/lexicon.json"),
                "--out",
                p(&fx.dir.path().join("w")),
            ])
            .output()
            .unwrap()
    };
    assert!(run("2").status.success());
    assert_eq!(run("many").status.code(), Some(2));
}
