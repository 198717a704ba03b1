//! Deterministic offline generator.
//!
//! Ranks the distinct terms of a source text by inverse document frequency
//! over the index (rarest first, ties alphabetical) and emits candidate
//! `i` as the top `2 + i` terms joined by spaces. The source text depends
//! on the task:
//!
//! * query-by-example: the example document in the input slot;
//! * feedback: the selected document in the context slot, minus terms
//!   already in the query;
//! * expansion: the top BM25 document for the query, minus terms already in
//!   the query. Without a matching document no candidates are produced.
//!
//! The seed is accepted for interface parity and does not change output.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::generation::{CandidateSource, GenerationError, GenerationRequest, Generator, Task};
use crate::index::Index;
use crate::pipeline::rank;
use crate::scoring::Bm25;
use crate::tokenize::tokenize;

#[derive(Debug, Clone)]
pub struct StubGenerator {
    index: Arc<Index>,
    seed: u64,
}

impl StubGenerator {
    pub fn new(index: Arc<Index>, seed: u64) -> Self {
        Self { index, seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Distinct terms of `text` not in `exclude`, rarest first.
    pub fn ranked_terms(&self, text: &str, exclude: &BTreeSet<String>) -> Vec<String> {
        let terms: BTreeSet<String> =
            tokenize(text).into_iter().filter(|t| !exclude.contains(t)).collect();
        let mut terms: Vec<(u32, String)> =
            terms.into_iter().map(|t| (self.index.doc_freq(&t), t)).collect();
        // idf is strictly decreasing in df, so ordering by df avoids
        // comparing floats.
        terms.sort();
        terms.into_iter().map(|(_, t)| t).collect()
    }

    pub fn stub_generate(&self, source: &str, exclude: &BTreeSet<String>, n: u32) -> Vec<String> {
        let ranked = self.ranked_terms(source, exclude);
        let mut out: Vec<String> = Vec::new();
        for i in 0..n as usize {
            let take = (2 + i).min(ranked.len());
            if take == 0 {
                break;
            }
            let candidate = ranked[..take].join(" ");
            if out.last() == Some(&candidate) {
                break;
            }
            out.push(candidate);
        }
        out
    }
}

impl Generator for StubGenerator {
    fn generate(&self, req: &GenerationRequest<'_>) -> Result<Vec<String>, GenerationError> {
        if req.input.trim().is_empty() {
            return Err(GenerationError::EmptyInput);
        }
        let out = match req.task {
            Task::QueryByExample => self.stub_generate(req.input, &BTreeSet::new(), req.n),
            Task::Feedback => {
                let context = req.context.filter(|c| !c.trim().is_empty()).ok_or(GenerationError::EmptyInput)?;
                let exclude = tokenize(req.input).into_iter().collect();
                self.stub_generate(context, &exclude, req.n)
            }
            Task::Expansion => {
                let query_terms = tokenize(req.input);
                let top = rank(&self.index, &Bm25::default(), &query_terms, 1);
                match top.first() {
                    Some(hit) => {
                        let exclude = query_terms.into_iter().collect();
                        self.stub_generate(&hit.text, &exclude, req.n)
                    }
                    None => Vec::new(),
                }
            }
        };
        Ok(out)
    }

    fn source(&self) -> CandidateSource {
        CandidateSource::Stub
    }
}
