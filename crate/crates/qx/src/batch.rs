//! Headless query-by-example runs: generate candidates for each example
//! document and retrieve with the first one.
//!
//! Output is one JSON object per example document:
//! `{"example_docno": str, "candidates": [str], "retrieved": [docno]}`.

use std::io::Write;

use qx_core::generation::generate_candidates;
use qx_core::prompt::{build_qbe_prompt, truncate_chars, DOC_CHAR_BUDGET};
use qx_core::{Clock, Document, GenerationRequest, Generator, GeneratorConfig, Index, PipelineRegistry, PromptTemplate, Task};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatchRecord {
    pub example_docno: String,
    pub candidates: Vec<String>,
    pub retrieved: Vec<String>,
}

pub struct BatchConfig<'a> {
    pub template: &'a PromptTemplate,
    pub generator: &'a GeneratorConfig,
    pub pipeline: &'a str,
    pub k: usize,
}

pub fn run_batch(
    index: &Index,
    registry: &PipelineRegistry,
    generator: &dyn Generator,
    clock: &dyn Clock,
    docs: &[Document],
    config: &BatchConfig<'_>,
) -> anyhow::Result<Vec<BatchRecord>> {
    let mut out = Vec::with_capacity(docs.len());
    for doc in docs {
        let prompt = build_qbe_prompt(&doc.text, config.template)?;
        let input = truncate_chars(&doc.text, DOC_CHAR_BUDGET);
        let req = GenerationRequest::new(Task::QueryByExample, &prompt, input, config.generator);
        let candidates: Vec<String> =
            generate_candidates(generator, &req, clock)?.into_iter().map(|c| c.text).collect();
        let retrieved = match candidates.first() {
            Some(q) => registry
                .retrieve(index, q, config.pipeline, config.k)?
                .into_iter()
                .map(|d| d.docno)
                .collect(),
            None => Vec::new(),
        };
        out.push(BatchRecord { example_docno: doc.docno.clone(), candidates, retrieved });
    }
    Ok(out)
}

pub fn write_jsonl<W: Write>(mut w: W, records: &[BatchRecord]) -> std::io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    w.flush()
}
