//! Named retrieval pipelines and top-k ranking.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::index::Index;
use crate::scoring::{Bm25, Scorer, TermStats, TfIdf};
use crate::tokenize::tokenize;

pub const DEFAULT_K: usize = 10;
pub const BM25: &str = "BM25";
pub const TF_IDF: &str = "TF_IDF";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredDoc {
    pub docno: String,
    pub score: f64,
    /// 1-based.
    pub rank: usize,
    pub text: String,
    pub translated_text: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RetrieveError {
    #[error("unknown pipeline {0:?}")]
    UnknownPipeline(String),
    #[error("pipeline name must not be empty")]
    EmptyPipelineName,
    #[error("query has no terms after tokenization")]
    EmptyQuery,
    #[error("k must be at least 1")]
    ZeroK,
}

/// Map from pipeline name to scorer. Starts with `BM25` and `TF_IDF`.
#[derive(Debug, Clone)]
pub struct PipelineRegistry {
    entries: BTreeMap<String, Arc<dyn Scorer>>,
}

impl Default for PipelineRegistry {
    fn default() -> Self {
        let mut entries: BTreeMap<String, Arc<dyn Scorer>> = BTreeMap::new();
        entries.insert(BM25.into(), Arc::new(Bm25::default()));
        entries.insert(TF_IDF.into(), Arc::new(TfIdf));
        Self { entries }
    }
}

impl PipelineRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers `scorer` under `name`, replacing (with a warning) any
    /// existing entry.
    pub fn register(&mut self, name: &str, scorer: Arc<dyn Scorer>) -> Result<(), RetrieveError> {
        if name.is_empty() {
            return Err(RetrieveError::EmptyPipelineName);
        }
        if self.entries.insert(name.into(), scorer).is_some() {
            log::warn!("pipeline {name:?} re-registered; previous scorer replaced");
        }
        Ok(())
    }

    pub fn get(&self, name: &str) -> Result<&Arc<dyn Scorer>, RetrieveError> {
        self.entries.get(name).ok_or_else(|| RetrieveError::UnknownPipeline(name.into()))
    }

    pub fn contains(&self, name: &str) -> bool {
        self.entries.contains_key(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    /// Top-`k` documents for `query` under the named pipeline. Documents
    /// matching no query term are never returned.
    pub fn retrieve(
        &self,
        index: &Index,
        query: &str,
        pipeline: &str,
        k: usize,
    ) -> Result<Vec<ScoredDoc>, RetrieveError> {
        let scorer = self.get(pipeline)?;
        if k == 0 {
            return Err(RetrieveError::ZeroK);
        }
        let tokens = tokenize(query);
        if tokens.is_empty() {
            return Err(RetrieveError::EmptyQuery);
        }
        Ok(rank(index, scorer.as_ref(), &tokens, k))
    }
}

/// Scores closer than this (relative to the larger, at least 1.0) rank as equal.
pub const TIE_EPSILON: f64 = 1e-9;

/// Scores every document matching at least one of `tokens` and returns the
/// best `k`, ordered by score descending then docno ascending.
pub fn rank(index: &Index, scorer: &dyn Scorer, tokens: &[String], k: usize) -> Vec<ScoredDoc> {
    let mut query_terms: Vec<(&str, u32)> = Vec::new();
    for t in tokens {
        match query_terms.iter_mut().find(|(q, _)| *q == t.as_str()) {
            Some((_, qtf)) => *qtf += 1,
            None => query_terms.push((t.as_str(), 1)),
        }
    }

    let num_docs = index.num_docs() as u32;
    let avg_doc_len = index.avg_doc_length();
    let mut acc: BTreeMap<u32, f64> = BTreeMap::new();
    for (term, qtf) in query_terms {
        let postings = index.postings(term);
        let df = postings.len() as u32;
        for p in postings {
            let stats = TermStats { tf: p.tf, df, doc_len: index.doc_length(p.doc), avg_doc_len, num_docs };
            let w = scorer.weight(&stats);
            let slot = acc.entry(p.doc).or_insert(0.0);
            for _ in 0..qtf {
                *slot += w;
            }
        }
    }

    let docno = |id: u32| index.document(id).docno.as_str();
    let mut hits: Vec<(u32, f64)> = acc.into_iter().collect();
    hits.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(Ordering::Equal).then_with(|| docno(a.0).cmp(docno(b.0))));
    // Sums over different term orders can differ in the last bits; scores
    // that close to the head of a run are one tie, ordered by docno.
    let mut start = 0;
    while start < hits.len() {
        let anchor = hits[start].1;
        let tolerance = TIE_EPSILON * libm::fabs(anchor).max(1.0);
        let end = start + hits[start..].iter().take_while(|h| anchor - h.1 <= tolerance).count();
        hits[start..end].sort_by(|a, b| docno(a.0).cmp(docno(b.0)));
        start = end;
    }
    hits.truncate(k);
    hits.into_iter()
        .enumerate()
        .map(|(i, (id, score))| {
            let doc = index.document(id);
            ScoredDoc {
                docno: doc.docno.clone(),
                score,
                rank: i + 1,
                text: doc.text.clone(),
                translated_text: None,
            }
        })
        .collect()
}
