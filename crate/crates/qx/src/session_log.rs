//! Append-only interaction logs.
//!
//! Three JSONL streams live under one directory: `queries.jsonl`,
//! `results.jsonl` and `annotations.jsonl`. Every append goes through the
//! stream's single writer and is synced to disk before the call returns.
//! Timestamps are epoch milliseconds, clamped so they never run backwards
//! across the whole log, which keeps each file in timestamp order.

use std::collections::{BTreeMap, HashMap};
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use qx_core::session::lineage;
use qx_core::{
    AnnotationRecord, Clock, Grade, LineageEntry, LogError, QueryEvent, QueryLog, QuerySource, ResultEntry,
    ResultRecord, Session,
};
use serde::de::DeserializeOwned;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LogKind {
    Queries,
    Results,
    Annotations,
}

impl LogKind {
    pub const ALL: [LogKind; 3] = [LogKind::Queries, LogKind::Results, LogKind::Annotations];

    pub fn name(self) -> &'static str {
        match self {
            LogKind::Queries => "queries",
            LogKind::Results => "results",
            LogKind::Annotations => "annotations",
        }
    }

    pub fn file_name(self) -> &'static str {
        match self {
            LogKind::Queries => "queries.jsonl",
            LogKind::Results => "results.jsonl",
            LogKind::Annotations => "annotations.jsonl",
        }
    }
}

impl FromStr for LogKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        LogKind::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| format!("unknown log {s:?}"))
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ReadError {
    #[error("{path}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: corrupt record at byte offset {offset}: {message}")]
    Corrupt { path: PathBuf, offset: u64, message: String },
}

/// Reads a JSONL stream; a missing file is an empty log.
pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, ReadError> {
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(source) => return Err(ReadError::Io { path: path.into(), source }),
    };
    let mut reader = BufReader::new(file);
    let mut out = Vec::new();
    let mut offset = 0u64;
    let mut line = String::new();
    loop {
        line.clear();
        let n = reader.read_line(&mut line).map_err(|source| ReadError::Io { path: path.into(), source })?;
        if n == 0 {
            break;
        }
        if !line.trim().is_empty() {
            let record = serde_json::from_str(line.trim_end_matches(['\n', '\r'])).map_err(|e| {
                ReadError::Corrupt { path: path.into(), offset, message: e.to_string() }
            })?;
            out.push(record);
        }
        offset += n as u64;
    }
    Ok(out)
}

pub struct SessionLog {
    dir: PathBuf,
    clock: Arc<dyn Clock>,
    queries: Mutex<File>,
    results: Mutex<File>,
    annotations: Mutex<File>,
    last_ts: AtomicU64,
    /// Known sessions and their current query.
    sessions: Mutex<HashMap<String, Option<String>>>,
}

impl std::fmt::Debug for SessionLog {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SessionLog").field("dir", &self.dir).finish_non_exhaustive()
    }
}

fn open_append(path: &Path) -> std::io::Result<File> {
    OpenOptions::new().create(true).append(true).open(path)
}

fn storage(e: impl std::fmt::Display) -> LogError {
    LogError(e.to_string())
}

impl SessionLog {
    /// Opens (creating if needed) the log directory and replays existing
    /// records to recover known sessions and their current queries.
    pub fn open(dir: impl Into<PathBuf>, clock: Arc<dyn Clock>) -> anyhow::Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(|e| anyhow::anyhow!("cannot create log dir {}: {e}", dir.display()))?;
        let open = |kind: LogKind| -> anyhow::Result<Mutex<File>> {
            let path = dir.join(kind.file_name());
            Ok(Mutex::new(open_append(&path).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?))
        };
        let log = Self {
            queries: open(LogKind::Queries)?,
            results: open(LogKind::Results)?,
            annotations: open(LogKind::Annotations)?,
            dir,
            clock,
            last_ts: AtomicU64::new(0),
            sessions: Mutex::new(HashMap::new()),
        };

        let mut last = 0;
        let mut sessions = HashMap::new();
        for ev in log.read_queries()? {
            last = last.max(ev.timestamp_ms);
            sessions.insert(ev.session_id, Some(ev.query));
        }
        for rec in log.read_results()? {
            last = last.max(rec.timestamp_ms);
            sessions.entry(rec.session_id).or_insert(None);
        }
        for rec in log.read_annotations()? {
            last = last.max(rec.timestamp_ms);
            sessions.entry(rec.session_id).or_insert(None);
        }
        log.last_ts.store(last, Ordering::SeqCst);
        *log.sessions.lock().unwrap() = sessions;
        Ok(log)
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path(&self, kind: LogKind) -> PathBuf {
        self.dir.join(kind.file_name())
    }

    fn next_ts(&self) -> u64 {
        let now = self.clock.now_ms();
        let prev = self.last_ts.fetch_max(now, Ordering::SeqCst);
        prev.max(now)
    }

    fn append<T: Serialize>(&self, file: &Mutex<File>, make: impl FnOnce(u64) -> T) -> Result<T, LogError> {
        let mut file = file.lock().unwrap();
        let record = make(self.next_ts());
        let mut line = serde_json::to_string(&record).map_err(storage)?;
        line.push('\n');
        file.write_all(line.as_bytes()).map_err(storage)?;
        file.sync_data().map_err(storage)?;
        Ok(record)
    }

    /// Verifies the three streams can still be opened for appending.
    pub fn check_writable(&self) -> Result<(), LogError> {
        for kind in LogKind::ALL {
            let path = self.path(kind);
            open_append(&path).map_err(|e| LogError(format!("{}: {e}", path.display())))?;
        }
        Ok(())
    }

    pub fn new_session(&self) -> Result<Session, LogError> {
        self.check_writable()?;
        let session = Session { session_id: uuid::Uuid::new_v4().to_string(), created_at: self.next_ts() };
        self.sessions.lock().unwrap().insert(session.session_id.clone(), None);
        Ok(session)
    }

    pub fn has_session(&self, session_id: &str) -> bool {
        self.sessions.lock().unwrap().contains_key(session_id)
    }

    pub fn current_query(&self, session_id: &str) -> Option<String> {
        self.sessions.lock().unwrap().get(session_id).cloned().flatten()
    }

    pub fn record_results(
        &self,
        session_id: &str,
        query: &str,
        pipeline: &str,
        results: Vec<ResultEntry>,
    ) -> Result<ResultRecord, LogError> {
        if !ResultRecord::ranks_are_contiguous(&results) {
            return Err(LogError("result ranks must run 1..=n without gaps".into()));
        }
        let record = self.append(&self.results, |timestamp_ms| ResultRecord {
            session_id: session_id.into(),
            timestamp_ms,
            query: query.into(),
            pipeline: pipeline.into(),
            results,
        })?;
        self.sessions.lock().unwrap().entry(session_id.into()).or_insert(None);
        Ok(record)
    }

    pub fn record_annotation(
        &self,
        session_id: &str,
        query: &str,
        docno: &str,
        grade: Grade,
    ) -> Result<AnnotationRecord, LogError> {
        let record = self.append(&self.annotations, |timestamp_ms| AnnotationRecord {
            session_id: session_id.into(),
            timestamp_ms,
            query: query.into(),
            docno: docno.into(),
            grade,
        })?;
        self.sessions.lock().unwrap().entry(session_id.into()).or_insert(None);
        Ok(record)
    }

    pub fn read_queries(&self) -> Result<Vec<QueryEvent>, ReadError> {
        read_jsonl(&self.path(LogKind::Queries))
    }

    pub fn read_results(&self) -> Result<Vec<ResultRecord>, ReadError> {
        read_jsonl(&self.path(LogKind::Results))
    }

    pub fn read_annotations(&self) -> Result<Vec<AnnotationRecord>, ReadError> {
        read_jsonl(&self.path(LogKind::Annotations))
    }

    /// Any stream as untyped JSON values, in append order.
    pub fn read_log(&self, kind: LogKind) -> Result<Vec<serde_json::Value>, ReadError> {
        read_jsonl(&self.path(kind))
    }

    /// Latest grade per (session, query, docno).
    pub fn latest_annotations(&self) -> Result<BTreeMap<(String, String, String), AnnotationRecord>, ReadError> {
        let mut out = BTreeMap::new();
        for rec in self.read_annotations()? {
            out.insert((rec.session_id.clone(), rec.query.clone(), rec.docno.clone()), rec);
        }
        Ok(out)
    }

    pub fn lineage(&self, session_id: &str) -> Result<Vec<LineageEntry>, ReadError> {
        Ok(lineage(&self.read_queries()?, session_id))
    }
}

impl QueryLog for SessionLog {
    fn on_query_change(
        &self,
        session_id: &str,
        log_name: &str,
        previous_query: Option<&str>,
        query: &str,
        source: QuerySource,
    ) -> Result<QueryEvent, LogError> {
        if query.trim().is_empty() {
            return Err(LogError("query must not be empty".into()));
        }
        let event = self.append(&self.queries, |timestamp_ms| QueryEvent {
            session_id: session_id.into(),
            timestamp_ms,
            previous_query: previous_query.map(String::from),
            query: query.into(),
            source,
            log_name: log_name.into(),
        })?;
        self.sessions.lock().unwrap().insert(session_id.into(), Some(query.into()));
        Ok(event)
    }
}
