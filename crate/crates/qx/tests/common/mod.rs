#![allow(dead_code)]

use std::net::TcpListener;
use std::path::{Path, PathBuf};
use std::process::{Child, Command, Stdio};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use axum::body::Body;
use axum::http::Request;
use axum::Router;
use http_body_util::BodyExt;
use qx::corpus_io::{ingest_corpus, CorpusFormat};
use qx::session_log::SessionLog;
use qx::settings::Settings;
use qx::workbench::Workbench;
use qx_core::{Clock, Index};
use serde_json::Value;
use tower::ServiceExt;

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

#[derive(Default)]
pub struct TickClock(AtomicU64);

impl Clock for TickClock {
    fn now_ms(&self) -> u64 {
        self.0.fetch_add(1, Ordering::SeqCst) + 1
    }
}

pub fn fixture_index() -> Arc<Index> {
    let corpus = ingest_corpus(&fixture("corpus.jsonl"), CorpusFormat::Jsonl).unwrap();
    Arc::new(Index::build(&corpus).unwrap())
}

pub fn workbench(log_dir: &Path) -> Arc<Workbench> {
    let clock = Arc::new(TickClock::default());
    let log = Arc::new(SessionLog::open(log_dir, clock.clone()).unwrap());
    Arc::new(Workbench::new(fixture_index(), log, clock, Settings::default()).unwrap())
}

pub async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (u16, Value) {
    let builder = Request::builder().method(method).uri(uri);
    let req = match body {
        Some(b) => builder.header("content-type", "application/json").body(Body::from(b.to_string())),
        None => builder.body(Body::empty()),
    }
    .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status().as_u16();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let value = if bytes.is_empty() { Value::Null } else { serde_json::from_slice(&bytes).unwrap() };
    (status, value)
}

/// Lowercased alphanumeric runs, the way a reader would count words.
pub fn words(text: &str) -> Vec<String> {
    text.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|w| !w.is_empty())
        .map(String::from)
        .collect()
}

/// Brute-force ranking from raw word counts, recomputing document
/// frequencies for every query term.
pub struct Oracle {
    docnos: Vec<String>,
    bags: Vec<Vec<String>>,
    avgdl: f64,
}

impl Oracle {
    pub fn new(docs: &[(String, String)]) -> Self {
        let bags: Vec<Vec<String>> = docs.iter().map(|(_, t)| words(t)).collect();
        let avgdl = bags.iter().map(Vec::len).sum::<usize>() as f64 / docs.len() as f64;
        Self { docnos: docs.iter().map(|(d, _)| d.clone()).collect(), bags, avgdl }
    }

    pub fn rank(&self, query: &str, tfidf: bool) -> Vec<(String, f64)> {
        const K1: f64 = 1.2;
        const B: f64 = 0.75;
        let n = self.bags.len() as f64;
        let mut out = Vec::new();
        for (i, docno) in self.docnos.iter().enumerate() {
            let mut score = 0.0;
            let mut matched = false;
            for q in words(query) {
                let tf = self.bags[i].iter().filter(|w| **w == q).count() as f64;
                if tf == 0.0 {
                    continue;
                }
                matched = true;
                let df = self.bags.iter().filter(|b| b.contains(&q)).count() as f64;
                let idf = (1.0 + (n - df + 0.5) / (df + 0.5)).ln();
                let dl = self.bags[i].len() as f64;
                score += if tfidf { tf * idf } else { idf * tf * (K1 + 1.0) / (tf + K1 * (1.0 - B + B * dl / self.avgdl)) };
            }
            if matched {
                out.push((docno.clone(), score));
            }
        }
        out.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then_with(|| a.0.cmp(&b.0)));
        // Mathematically equal sums may differ in the last bits; treat them as ties.
        let mut start = 0;
        while start < out.len() {
            let anchor = out[start].1;
            let end = start + out[start..].iter().take_while(|x| anchor - x.1 <= 1e-9 * anchor.abs().max(1.0)).count();
            out[start..end].sort_by(|a, b| a.0.cmp(&b.0));
            start = end;
        }
        out
    }
}

pub fn oracle_rank(docs: &[(String, String)], query: &str, tfidf: bool) -> Vec<(String, f64)> {
    Oracle::new(docs).rank(query, tfidf)
}

pub fn fixture_docs() -> Vec<(String, String)> {
    std::fs::read_to_string(fixture("corpus.jsonl"))
        .unwrap()
        .lines()
        .map(|l| {
            let v: Value = serde_json::from_str(l).unwrap();
            (v["docno"].as_str().unwrap().to_string(), v["text"].as_str().unwrap().to_string())
        })
        .collect()
}

pub fn qx() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_qx"));
    cmd.env_remove("QX_GENERATOR_URL").env_remove("QX_GENERATOR_KEY").env_remove("QX_LOG_DIR").env("RUST_LOG", "warn");
    cmd
}

pub fn build_index(out: &Path) {
    let status = qx()
        .args(["index", "--corpus"])
        .arg(fixture("corpus.jsonl"))
        .arg("--out")
        .arg(out)
        .stdout(Stdio::null())
        .status()
        .unwrap();
    assert!(status.success());
}

pub fn free_port() -> u16 {
    TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port()
}

/// A `qx serve` child process; killed with SIGKILL on drop.
pub struct Server {
    pub child: Child,
    pub base: String,
}

impl Server {
    pub fn spawn(index: &Path, log_dir: &Path) -> Server {
        let port = free_port();
        let child = qx()
            .args(["serve", "--generator", "stub", "--port", &port.to_string(), "--index"])
            .arg(index)
            .arg("--log-dir")
            .arg(log_dir)
            .stdout(Stdio::null())
            .stderr(Stdio::null())
            .spawn()
            .unwrap();
        let server = Server { child, base: format!("http://127.0.0.1:{port}") };
        let deadline = Instant::now() + Duration::from_secs(20);
        while ureq::get(&server.url("/api/settings")).call().is_err() {
            assert!(Instant::now() < deadline, "server did not come up");
            std::thread::sleep(Duration::from_millis(50));
        }
        server
    }

    pub fn url(&self, path: &str) -> String {
        format!("{}{path}", self.base)
    }

    pub fn post(&self, path: &str, body: Value) -> Value {
        ureq::post(&self.url(path)).send_json(&body).unwrap().body_mut().read_json().unwrap()
    }

    pub fn get(&self, path: &str) -> Value {
        ureq::get(&self.url(path)).call().unwrap().body_mut().read_json().unwrap()
    }

    pub fn kill(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

impl Drop for Server {
    fn drop(&mut self) {
        self.kill();
    }
}
