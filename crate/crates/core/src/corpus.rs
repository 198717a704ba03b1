use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

pub const DEFAULT_LANG: &str = "eng";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub docno: String,
    pub text: String,
    /// ISO 639-3 language code.
    #[serde(default = "default_lang")]
    pub lang: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub title: Option<String>,
}

fn default_lang() -> String {
    String::from(DEFAULT_LANG)
}

impl Document {
    pub fn new(docno: impl Into<String>, text: impl Into<String>) -> Self {
        Self { docno: docno.into(), text: text.into(), lang: default_lang(), title: None }
    }

    pub fn validate(&self) -> Result<(), CorpusError> {
        if self.docno.is_empty() {
            return Err(CorpusError::EmptyDocno);
        }
        if self.text.trim().is_empty() {
            return Err(CorpusError::EmptyText { docno: self.docno.clone() });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CorpusError {
    #[error("document has an empty docno")]
    EmptyDocno,
    #[error("document {docno:?} has no text")]
    EmptyText { docno: String },
    #[error("duplicate docno {docno:?}")]
    DuplicateDocno { docno: String },
}

/// Ordered collection of documents with unique docnos.
#[derive(Debug, Clone, Default)]
pub struct Corpus {
    docs: Vec<Document>,
    positions: BTreeMap<String, usize>,
}

impl Corpus {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a document, preserving insertion order.
    pub fn push(&mut self, doc: Document) -> Result<(), CorpusError> {
        doc.validate()?;
        if self.positions.contains_key(&doc.docno) {
            return Err(CorpusError::DuplicateDocno { docno: doc.docno });
        }
        self.positions.insert(doc.docno.clone(), self.docs.len());
        self.docs.push(doc);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    pub fn get(&self, docno: &str) -> Option<&Document> {
        self.positions.get(docno).map(|&i| &self.docs[i])
    }

    pub fn documents(&self) -> &[Document] {
        &self.docs
    }

    pub fn into_documents(self) -> Vec<Document> {
        self.docs
    }
}

impl TryFrom<Vec<Document>> for Corpus {
    type Error = CorpusError;

    fn try_from(docs: Vec<Document>) -> Result<Self, Self::Error> {
        let mut corpus = Corpus::new();
        for doc in docs {
            corpus.push(doc)?;
        }
        Ok(corpus)
    }
}
