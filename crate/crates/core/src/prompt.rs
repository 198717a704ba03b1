//! Prompt construction for query generation and keyword expansion.
//!
//! Query-by-example layout:
//!
//! ```text
//! {instruction}\n\n
//! Document: {exemplar.document}\nQuery: {exemplar.query}\n\n   (per exemplar)
//! Document: {input}\nQuery:
//! ```
//!
//! Keyword layout (expansion and feedback):
//!
//! ```text
//! {instruction}\n\nQuery: {query}\nKeywords:
//! ```
//!
//! where a feedback instruction carries a `{document}` slot that receives
//! the selected document.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

pub const QBE_INSTRUCTION: &str = "Generate a query given the following document";
pub const EXPANSION_INSTRUCTION: &str =
    "Improve the search effectiveness by suggesting expansion terms for the query";
pub const FEEDBACK_INSTRUCTION: &str =
    "Based on the given context ```{document}```, generate keywords for the query";
pub const DOCUMENT_SLOT: &str = "{document}";

/// Documents are cut to this many characters before entering any prompt.
pub const DOC_CHAR_BUDGET: usize = 4000;

const DEFAULT_EXEMPLARS: &str = include_str!("../data/default_exemplars.json");

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PromptError {
    #[error("prompt input is empty")]
    EmptyInput,
    #[error("instruction is empty")]
    EmptyInstruction,
    #[error("exemplar {0} has an empty document or query")]
    EmptyExemplar(usize),
    #[error("feedback instruction lacks the {{document}} slot")]
    MissingDocumentSlot,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exemplar {
    pub document: String,
    pub query: String,
}

/// Few-shot template; zero exemplars means zero-shot.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptTemplate {
    pub instruction: String,
    pub exemplars: Vec<Exemplar>,
}

impl Default for PromptTemplate {
    /// The query-by-example instruction with the three bundled exemplars.
    fn default() -> Self {
        Self { instruction: QBE_INSTRUCTION.into(), exemplars: default_exemplars() }
    }
}

impl PromptTemplate {
    pub fn zero_shot(instruction: impl Into<String>) -> Self {
        Self { instruction: instruction.into(), exemplars: Vec::new() }
    }

    pub fn validate(&self) -> Result<(), PromptError> {
        if self.instruction.trim().is_empty() {
            return Err(PromptError::EmptyInstruction);
        }
        for (i, ex) in self.exemplars.iter().enumerate() {
            if ex.document.trim().is_empty() || ex.query.trim().is_empty() {
                return Err(PromptError::EmptyExemplar(i));
            }
        }
        Ok(())
    }

    /// Renders the template around `input` verbatim (no truncation).
    pub fn render(&self, input: &str) -> String {
        let mut out = String::with_capacity(self.instruction.len() + input.len() + 64);
        out.push_str(&self.instruction);
        out.push_str("\n\n");
        for ex in &self.exemplars {
            out.push_str("Document: ");
            out.push_str(&ex.document);
            out.push_str("\nQuery: ");
            out.push_str(&ex.query);
            out.push_str("\n\n");
        }
        out.push_str("Document: ");
        out.push_str(input);
        out.push_str("\nQuery:");
        out
    }
}

pub fn default_exemplars() -> Vec<Exemplar> {
    serde_json::from_str(DEFAULT_EXEMPLARS).expect("bundled exemplars are valid JSON")
}

/// First `max_chars` characters of `text`.
pub fn truncate_chars(text: &str, max_chars: usize) -> &str {
    text.char_indices().nth(max_chars).map_or(text, |(i, _)| &text[..i])
}

pub fn build_qbe_prompt(example_doc: &str, template: &PromptTemplate) -> Result<String, PromptError> {
    build_qbe_prompt_with_budget(example_doc, template, DOC_CHAR_BUDGET)
}

pub fn build_qbe_prompt_with_budget(
    example_doc: &str,
    template: &PromptTemplate,
    budget: usize,
) -> Result<String, PromptError> {
    if example_doc.trim().is_empty() {
        return Err(PromptError::EmptyInput);
    }
    template.validate()?;
    Ok(template.render(truncate_chars(example_doc, budget)))
}

pub fn build_expansion_prompt(instruction: &str, query: &str) -> Result<String, PromptError> {
    if instruction.trim().is_empty() {
        return Err(PromptError::EmptyInstruction);
    }
    if query.trim().is_empty() {
        return Err(PromptError::EmptyInput);
    }
    let mut out = String::with_capacity(instruction.len() + query.len() + 24);
    out.push_str(instruction);
    out.push_str("\n\nQuery: ");
    out.push_str(query);
    out.push_str("\nKeywords:");
    Ok(out)
}

/// Substitutes the (truncated) document into the instruction's
/// `{document}` slot, then applies the keyword layout.
pub fn build_feedback_prompt(
    instruction: &str,
    document: &str,
    query: &str,
) -> Result<String, PromptError> {
    validate_feedback_instruction(instruction)?;
    if document.trim().is_empty() {
        return Err(PromptError::EmptyInput);
    }
    let filled = instruction.replacen(DOCUMENT_SLOT, truncate_chars(document, DOC_CHAR_BUDGET), 1);
    build_expansion_prompt(&filled, query)
}

pub fn validate_feedback_instruction(instruction: &str) -> Result<(), PromptError> {
    if instruction.trim().is_empty() {
        return Err(PromptError::EmptyInstruction);
    }
    if !instruction.contains(DOCUMENT_SLOT) {
        return Err(PromptError::MissingDocumentSlot);
    }
    Ok(())
}
