//! Keyword expansion of an existing query, standalone or from user-selected
//! feedback documents.
//!
//! Both flows append keywords to the query text unchanged: the result is
//! `query + " " + terms` where each appended term is a token not already in
//! the query (case-insensitively) and at most [`MAX_KEYWORDS`] terms are
//! appended. When nothing survives, the query is returned as is and no
//! event is written.

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::generation::{generate_candidates, GenerationError, GenerationRequest, Generator, GeneratorConfig, Task};
use crate::index::Index;
use crate::keywords::{parse_keywords, MAX_KEYWORDS};
use crate::prompt::{build_expansion_prompt, build_feedback_prompt, truncate_chars, PromptError, DOC_CHAR_BUDGET};
use crate::session::{Clock, LogError, QueryLog, QuerySource, LOG_FEEDBACK, LOG_REFORMULATIONS};
use crate::tokenize::tokenize;

#[derive(Debug, Clone)]
pub struct ReformulationRequest {
    pub session_id: String,
    pub query: String,
    /// Empty for standalone expansion.
    pub selected_docs: Vec<String>,
    pub instruction: String,
    pub config: GeneratorConfig,
}

/// Collaborators shared by both flows.
#[derive(Clone, Copy)]
pub struct Reformulator<'a> {
    pub generator: &'a dyn Generator,
    pub clock: &'a dyn Clock,
    pub log: &'a dyn QueryLog,
    pub index: &'a Index,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ReformulationError {
    #[error("query is empty")]
    EmptyQuery,
    #[error("standalone expansion takes no selected documents")]
    UnexpectedSelection,
    #[error("feedback requires at least one selected document")]
    NoSelection,
    #[error("unknown docno {0:?}")]
    UnknownDocno(String),
    #[error(transparent)]
    Generation(#[from] GenerationError),
    #[error(transparent)]
    Prompt(#[from] PromptError),
    #[error(transparent)]
    Log(#[from] LogError),
}

/// Tokens of `keywords` that may be appended to `query`, in order, without
/// repeats and capped at `cap`.
pub fn appendable_terms(query: &str, keywords: &[String], cap: usize) -> Vec<String> {
    let present: BTreeSet<String> = tokenize(query).into_iter().collect();
    let mut out: Vec<String> = Vec::new();
    for term in keywords.iter().flat_map(|k| tokenize(k)) {
        if out.len() == cap {
            break;
        }
        if !present.contains(&term) && !out.contains(&term) {
            out.push(term);
        }
    }
    out
}

pub fn compose_query(query: &str, keywords: &[String]) -> String {
    let terms = appendable_terms(query, keywords, MAX_KEYWORDS);
    if terms.is_empty() {
        return query.to_string();
    }
    let mut out = String::with_capacity(query.len() + 1 + terms.iter().map(|t| t.len() + 1).sum::<usize>());
    out.push_str(query);
    out.push(' ');
    out.push_str(&terms.join(" "));
    out
}

fn first_candidate_keywords(
    r: &Reformulator<'_>,
    req: &GenerationRequest<'_>,
) -> Result<Vec<String>, GenerationError> {
    let candidates = generate_candidates(r.generator, req, r.clock)?;
    Ok(candidates.first().map(|c| parse_keywords(&c.text)).unwrap_or_default())
}

fn finish(
    r: &Reformulator<'_>,
    req: &ReformulationRequest,
    keywords: &[String],
    log_name: &str,
    source: QuerySource,
) -> Result<String, ReformulationError> {
    let reformed = compose_query(&req.query, keywords);
    if reformed != req.query {
        r.log.on_query_change(&req.session_id, log_name, Some(&req.query), &reformed, source)?;
    }
    Ok(reformed)
}

/// Standalone expansion: asks the generator for keywords for the query.
pub fn append_keywords(r: &Reformulator<'_>, req: &ReformulationRequest) -> Result<String, ReformulationError> {
    if req.query.trim().is_empty() {
        return Err(ReformulationError::EmptyQuery);
    }
    if !req.selected_docs.is_empty() {
        return Err(ReformulationError::UnexpectedSelection);
    }
    req.config.validate()?;
    let prompt = build_expansion_prompt(&req.instruction, &req.query)?;
    let gen_req = GenerationRequest::new(Task::Expansion, &prompt, &req.query, &req.config);
    let keywords = first_candidate_keywords(r, &gen_req)?;
    finish(r, req, &keywords, LOG_REFORMULATIONS, QuerySource::Reformulator)
}

/// Relevance feedback: one prompt per selected document, keywords merged in
/// first-occurrence order.
pub fn send_feedback(r: &Reformulator<'_>, req: &ReformulationRequest) -> Result<String, ReformulationError> {
    if req.query.trim().is_empty() {
        return Err(ReformulationError::EmptyQuery);
    }
    if req.selected_docs.is_empty() {
        return Err(ReformulationError::NoSelection);
    }
    req.config.validate()?;
    let texts = req
        .selected_docs
        .iter()
        .map(|d| r.index.get_doc_text(d).map_err(|_| ReformulationError::UnknownDocno(d.clone())))
        .collect::<Result<Vec<_>, _>>()?;

    let mut merged: Vec<String> = Vec::new();
    for text in texts {
        let prompt = build_feedback_prompt(&req.instruction, text, &req.query)?;
        let context = truncate_chars(text, DOC_CHAR_BUDGET);
        let gen_req =
            GenerationRequest::new(Task::Feedback, &prompt, &req.query, &req.config).with_context(context);
        for kw in first_candidate_keywords(r, &gen_req)? {
            if !merged.contains(&kw) {
                merged.push(kw);
            }
        }
    }
    finish(r, req, &merged, LOG_FEEDBACK, QuerySource::Feedback)
}
