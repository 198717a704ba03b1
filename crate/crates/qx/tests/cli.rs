mod common;

use std::process::Output;

use common::{build_index, fixture, qx, Server};
use qx::batch::BatchRecord;
use qx::index_store::read_manifest;
use serde_json::{json, Value};

fn run(args: &[&str]) -> Output {
    qx().args(args).output().unwrap()
}

fn path(p: &std::path::Path) -> &str {
    p.to_str().unwrap()
}

fn write_corpus(dir: &std::path::Path, lines: &[Value]) -> std::path::PathBuf {
    let file = dir.join("corpus.jsonl");
    let body: String = lines.iter().map(|l| format!("{l}\n")).collect();
    std::fs::write(&file, body).unwrap();
    file
}

#[test]
fn index_reports_document_count() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write_corpus(
        dir.path(),
        &[
            json!({ "docno": "d1", "text": "a b b" }),
            json!({ "docno": "d2", "text": "b c" }),
            json!({ "docno": "d3", "text": "c d e", "lang": "deu" }),
        ],
    );
    let out = dir.path().join("idx");
    let res = run(&["index", "--corpus", path(&corpus), "--out", path(&out)]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let printed: Value = serde_json::from_slice(&res.stdout).unwrap();
    assert_eq!(printed["num_docs"], 3);
    assert_eq!(read_manifest(&out).unwrap().num_docs, 3);
}

#[test]
fn rebuilt_index_has_identical_statistics() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    build_index(&a);
    build_index(&b);
    assert_eq!(read_manifest(&a).unwrap(), read_manifest(&b).unwrap());
    for file in ["manifest.json", "documents.jsonl", "postings.jsonl"] {
        assert_eq!(std::fs::read(a.join(file)).unwrap(), std::fs::read(b.join(file)).unwrap(), "{file}");
    }
}

#[test]
fn runtime_and_usage_errors_have_distinct_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.jsonl");
    let res = run(&["index", "--corpus", path(&missing), "--out", path(&dir.path().join("o"))]);
    assert_eq!(res.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&res.stderr).contains("nope.jsonl"));

    let bad = write_corpus(dir.path(), &[json!({ "docno": "d1", "text": "x" }), json!({ "docno": "d1", "text": "y" })]);
    let res = run(&["index", "--corpus", path(&bad), "--out", path(&dir.path().join("o"))]);
    assert_eq!(res.status.code(), Some(1));

    assert_eq!(run(&["reindex"]).status.code(), Some(2));
    assert_eq!(run(&["index", "--corpus", "x", "--out", "y", "--colour"]).status.code(), Some(2));
    assert_eq!(run(&["export-logs", "--log-dir", ".", "--format", "xml", "--out", "o"]).status.code(), Some(2));
}

#[test]
fn serve_rejects_bad_index_dir() {
    let dir = tempfile::tempdir().unwrap();
    let res = run(&["serve", "--index", path(&dir.path().join("missing")), "--log-dir", path(dir.path())]);
    assert_eq!(res.status.code(), Some(1));
}

#[test]
fn serve_answers_settings_and_survives_sigkill() {
    let dir = tempfile::tempdir().unwrap();
    let (index, logs) = (dir.path().join("idx"), dir.path().join("logs"));
    build_index(&index);
    let mut server = Server::spawn(&index, &logs);
    assert_eq!(server.get("/api/settings")["pipeline_name"], "BM25");
    let s = server.post("/api/session", json!({}))["session_id"].clone();
    for q in ["cricket", "tennis", "chess"] {
        server.post("/api/retrieve", json!({ "session_id": s, "query": q }));
    }
    server.kill();

    let restarted = Server::spawn(&index, &logs);
    assert_eq!(restarted.get("/api/logs/results").as_array().unwrap().len(), 3);
    assert_eq!(restarted.get("/api/logs/queries").as_array().unwrap().len(), 3);
    // The session is known again and its current query is restored.
    let out = restarted.post("/api/retrieve", json!({ "session_id": s, "query": "chess" }));
    assert!(!out["results"].as_array().unwrap().is_empty());
    assert_eq!(restarted.get("/api/logs/queries").as_array().unwrap().len(), 3);
}

fn populate_logs(dir: &std::path::Path) -> std::path::PathBuf {
    let (index, logs) = (dir.join("idx"), dir.join("logs"));
    build_index(&index);
    let server = Server::spawn(&index, &logs);
    let s = server.post("/api/session", json!({}))["session_id"].clone();
    server.post("/api/generate", json!({ "session_id": s, "example_document": "A wicket for the spin bowler." }));
    server.post("/api/retrieve", json!({ "session_id": s, "query": "spin bowler" }));
    server.post("/api/annotate", json!({ "session_id": s, "query": "spin bowler", "docno": "cr05", "grade": 3 }));
    server.post("/api/annotate", json!({ "session_id": s, "query": "spin bowler", "docno": "cr02", "grade": 1 }));
    logs
}

#[test]
fn export_jsonl_is_concatenation() {
    let dir = tempfile::tempdir().unwrap();
    let logs = populate_logs(dir.path());
    let out = dir.path().join("all.jsonl");
    let res = run(&["export-logs", "--log-dir", path(&logs), "--format", "jsonl", "--out", path(&out)]);
    assert!(res.status.success());
    let mut expected = Vec::new();
    for f in ["queries.jsonl", "results.jsonl", "annotations.jsonl"] {
        expected.extend(std::fs::read(logs.join(f)).unwrap());
    }
    assert_eq!(std::fs::read(&out).unwrap(), expected);
}

#[test]
fn export_csv_has_one_row_per_record() {
    let dir = tempfile::tempdir().unwrap();
    let logs = populate_logs(dir.path());
    let out = dir.path().join("all.csv");
    let res = run(&["export-logs", "--log-dir", path(&logs), "--format", "csv", "--out", path(&out)]);
    assert!(res.status.success());
    let records: usize = ["queries.jsonl", "results.jsonl", "annotations.jsonl"]
        .iter()
        .map(|f| std::fs::read_to_string(logs.join(f)).unwrap().lines().count())
        .sum();
    assert_eq!(records, 5);
    let mut reader = csv::Reader::from_path(&out).unwrap();
    assert_eq!(reader.headers().unwrap().get(0), Some("log"));
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), records);
    let logs_col: Vec<&str> = rows.iter().map(|r| &r[0]).collect();
    assert_eq!(logs_col, ["queries", "queries", "results", "annotations", "annotations"]);
}

#[test]
fn export_of_empty_logs() {
    let dir = tempfile::tempdir().unwrap();
    let (csv_out, jsonl_out) = (dir.path().join("e.csv"), dir.path().join("e.jsonl"));
    assert!(run(&["export-logs", "--log-dir", path(dir.path()), "--format", "csv", "--out", path(&csv_out)]).status.success());
    let text = std::fs::read_to_string(&csv_out).unwrap();
    assert_eq!(text.lines().count(), 1);
    assert!(text.starts_with("log,session_id,"));
    assert!(run(&["export-logs", "--log-dir", path(dir.path()), "--format", "jsonl", "--out", path(&jsonl_out)]).status.success());
    assert!(std::fs::read(&jsonl_out).unwrap().is_empty());

    let missing = dir.path().join("absent");
    let res = run(&["export-logs", "--log-dir", path(&missing), "--format", "csv", "--out", path(&csv_out)]);
    assert_eq!(res.status.code(), Some(1));
}

fn batch(index: &std::path::Path, docs: &std::path::Path, out: &std::path::Path) -> Vec<BatchRecord> {
    let res = run(&["batch-qbe", "--index", path(index), "--docs", path(docs), "--generator", "stub", "--out", path(out)]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    std::fs::read_to_string(out).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

#[test]
fn batch_qbe_over_five_documents() {
    let dir = tempfile::tempdir().unwrap();
    let index = dir.path().join("idx");
    build_index(&index);
    let five: String = std::fs::read_to_string(fixture("examples.jsonl")).unwrap().lines().take(5).map(|l| format!("{l}\n")).collect();
    let docs = dir.path().join("five.jsonl");
    std::fs::write(&docs, five).unwrap();

    let records = batch(&index, &docs, &dir.path().join("out.jsonl"));
    assert_eq!(records.len(), 5);
    let corpus = common::fixture_docs();
    for (i, r) in records.iter().enumerate() {
        assert_eq!(r.example_docno, format!("ex{:02}", i + 1));
        assert!(!r.candidates.is_empty() && r.candidates.len() <= 3);
        let expected: Vec<String> =
            common::oracle_rank(&corpus, &r.candidates[0], false).into_iter().take(10).map(|(d, _)| d).collect();
        assert_eq!(r.retrieved, expected);
    }
    let again = batch(&index, &docs, &dir.path().join("again.jsonl"));
    assert_eq!(records, again);
}

#[test]
fn batch_qbe_with_empty_docs() {
    let dir = tempfile::tempdir().unwrap();
    let index = dir.path().join("idx");
    build_index(&index);
    let docs = dir.path().join("empty.jsonl");
    std::fs::write(&docs, "").unwrap();
    let out = dir.path().join("out.jsonl");
    assert!(batch(&index, &docs, &out).is_empty());
    assert!(std::fs::read(&out).unwrap().is_empty());
}
