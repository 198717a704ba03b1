//! Interaction records and query lineage.
//!
//! Three record kinds make up the interaction logs: [`QueryEvent`] (every
//! change of a session's active query), [`ResultRecord`] (every retrieval)
//! and [`AnnotationRecord`] (every relevance judgment). Storage is the
//! business of the `qx` crate; this module only defines the records, the
//! [`QueryLog`] sink the flows emit into, and lineage reconstruction.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

pub const LOG_GENERATED: &str = "generated_queries";
pub const LOG_EDITS: &str = "query_edits";
pub const LOG_REFORMULATIONS: &str = "query_reformulations";
pub const LOG_FEEDBACK: &str = "feedback_query_reformulations";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Session {
    pub session_id: String,
    pub created_at: u64,
}

/// Who changed the query.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuerySource {
    UserEdit,
    Generator,
    Reformulator,
    Feedback,
}

impl QuerySource {
    pub fn as_str(self) -> &'static str {
        match self {
            QuerySource::UserEdit => "user_edit",
            QuerySource::Generator => "generator",
            QuerySource::Reformulator => "reformulator",
            QuerySource::Feedback => "feedback",
        }
    }
}

impl fmt::Display for QuerySource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryEvent {
    pub session_id: String,
    pub timestamp_ms: u64,
    pub previous_query: Option<String>,
    pub query: String,
    pub source: QuerySource,
    pub log_name: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultEntry {
    pub docno: String,
    pub rank: usize,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub session_id: String,
    pub timestamp_ms: u64,
    pub query: String,
    pub pipeline: String,
    pub results: Vec<ResultEntry>,
}

impl ResultRecord {
    /// Ranks must run 1..=len without gaps.
    pub fn ranks_are_contiguous(results: &[ResultEntry]) -> bool {
        results.iter().enumerate().all(|(i, r)| r.rank == i + 1)
    }
}

/// Graded relevance on the 0..=3 scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "i64")]
pub struct Grade(u8);

impl Grade {
    pub const MAX: u8 = 3;

    pub fn new(value: i64) -> Result<Self, GradeOutOfRange> {
        match u8::try_from(value) {
            Ok(v) if v <= Self::MAX => Ok(Self(v)),
            _ => Err(GradeOutOfRange(value)),
        }
    }

    pub fn value(self) -> u8 {
        self.0
    }
}

impl TryFrom<i64> for Grade {
    type Error = GradeOutOfRange;

    fn try_from(value: i64) -> Result<Self, Self::Error> {
        Self::new(value)
    }
}

impl From<Grade> for i64 {
    fn from(g: Grade) -> Self {
        i64::from(g.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("grade {0} outside 0..=3")]
pub struct GradeOutOfRange(pub i64);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationRecord {
    pub session_id: String,
    pub timestamp_ms: u64,
    pub query: String,
    pub docno: String,
    pub grade: Grade,
}

/// Milliseconds since the Unix epoch.
pub trait Clock: Send + Sync {
    fn now_ms(&self) -> u64;
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("log write failed: {0}")]
pub struct LogError(pub String);

/// Sink for query changes. Implementations must make the event durable
/// before returning `Ok`.
pub trait QueryLog {
    fn on_query_change(
        &self,
        session_id: &str,
        log_name: &str,
        previous_query: Option<&str>,
        query: &str,
        source: QuerySource,
    ) -> Result<QueryEvent, LogError>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Link {
    /// First event of the session.
    Start,
    Ok,
    /// `previous_query` does not match the prior event's query.
    Break,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineageEntry {
    pub event: QueryEvent,
    pub link: Link,
}

/// The session's query events ordered by timestamp (append order within
/// equal timestamps), each labeled with how it links to its predecessor.
pub fn lineage<'a>(
    events: impl IntoIterator<Item = &'a QueryEvent>,
    session_id: &str,
) -> Vec<LineageEntry> {
    let mut own: Vec<&QueryEvent> = events.into_iter().filter(|e| e.session_id == session_id).collect();
    own.sort_by_key(|e| e.timestamp_ms);
    let mut out: Vec<LineageEntry> = Vec::with_capacity(own.len());
    for event in own {
        let link = match out.last() {
            None => Link::Start,
            Some(prev) if event.previous_query.as_deref() == Some(prev.event.query.as_str()) => Link::Ok,
            Some(_) => Link::Break,
        };
        out.push(LineageEntry { event: event.clone(), link });
    }
    out
}
