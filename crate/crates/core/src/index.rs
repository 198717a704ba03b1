//! Immutable inverted index.
//!
//! Documents are addressed internally by dense `u32` ids in corpus order;
//! postings lists are sorted by id and only hold terms with tf >= 1.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Document};
use crate::tokenize::tokenize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Posting {
    pub doc: u32,
    pub tf: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IndexError {
    #[error("cannot build an index over an empty corpus")]
    EmptyCorpus,
    #[error("unknown docno {0:?}")]
    UnknownDocno(String),
    #[error("inconsistent index data: {0}")]
    Inconsistent(String),
}

#[derive(Debug, Clone)]
pub struct Index {
    docs: Vec<Document>,
    doc_lengths: Vec<u32>,
    postings: BTreeMap<String, Vec<Posting>>,
    lookup: BTreeMap<String, u32>,
    avg_doc_length: f64,
}

impl Index {
    pub fn build(corpus: &Corpus) -> Result<Self, IndexError> {
        if corpus.is_empty() {
            return Err(IndexError::EmptyCorpus);
        }
        let mut postings: BTreeMap<String, Vec<Posting>> = BTreeMap::new();
        for (id, doc) in corpus.documents().iter().enumerate() {
            let mut counts: BTreeMap<String, u32> = BTreeMap::new();
            for term in tokenize(&doc.text) {
                *counts.entry(term).or_insert(0) += 1;
            }
            for (term, tf) in counts {
                postings.entry(term).or_default().push(Posting { doc: id as u32, tf });
            }
        }
        Self::from_parts(corpus.documents().to_vec(), postings)
    }

    /// Reassembles an index from stored documents and postings, checking the
    /// structural invariants. Document lengths are derived from the postings.
    pub fn from_parts(
        docs: Vec<Document>,
        postings: BTreeMap<String, Vec<Posting>>,
    ) -> Result<Self, IndexError> {
        if docs.is_empty() {
            return Err(IndexError::EmptyCorpus);
        }
        let mut lookup = BTreeMap::new();
        for (id, doc) in docs.iter().enumerate() {
            if lookup.insert(doc.docno.clone(), id as u32).is_some() {
                return Err(IndexError::Inconsistent(format!("duplicate docno {:?}", doc.docno)));
            }
        }
        let mut doc_lengths = alloc::vec![0u32; docs.len()];
        for (term, list) in &postings {
            if list.is_empty() {
                return Err(IndexError::Inconsistent(format!("term {term:?} has no postings")));
            }
            let mut prev: Option<u32> = None;
            for p in list {
                if p.tf == 0 || p.doc as usize >= docs.len() || prev.is_some_and(|d| d >= p.doc) {
                    return Err(IndexError::Inconsistent(format!(
                        "bad posting {p:?} for term {term:?}"
                    )));
                }
                prev = Some(p.doc);
                doc_lengths[p.doc as usize] += p.tf;
            }
        }
        let total: u64 = doc_lengths.iter().map(|&l| u64::from(l)).sum();
        let avg_doc_length = total as f64 / docs.len() as f64;
        Ok(Self { docs, doc_lengths, postings, lookup, avg_doc_length })
    }

    /// N
    pub fn num_docs(&self) -> usize {
        self.docs.len()
    }

    pub fn num_terms(&self) -> usize {
        self.postings.len()
    }

    pub fn avg_doc_length(&self) -> f64 {
        self.avg_doc_length
    }

    pub fn total_tokens(&self) -> u64 {
        self.doc_lengths.iter().map(|&l| u64::from(l)).sum()
    }

    pub fn doc_freq(&self, term: &str) -> u32 {
        self.postings.get(term).map_or(0, |l| l.len() as u32)
    }

    pub fn postings(&self, term: &str) -> &[Posting] {
        self.postings.get(term).map_or(&[], Vec::as_slice)
    }

    /// Terms in lexicographic order with their postings.
    pub fn terms(&self) -> impl Iterator<Item = (&str, &[Posting])> {
        self.postings.iter().map(|(t, l)| (t.as_str(), l.as_slice()))
    }

    pub fn tf(&self, term: &str, docno: &str) -> u32 {
        let Some(&id) = self.lookup.get(docno) else { return 0 };
        let list = self.postings(term);
        list.binary_search_by_key(&id, |p| p.doc).map_or(0, |i| list[i].tf)
    }

    pub fn doc_id(&self, docno: &str) -> Option<u32> {
        self.lookup.get(docno).copied()
    }

    pub fn doc_length(&self, id: u32) -> u32 {
        self.doc_lengths[id as usize]
    }

    pub fn doc_length_of(&self, docno: &str) -> Option<u32> {
        self.doc_id(docno).map(|id| self.doc_length(id))
    }

    pub fn document(&self, id: u32) -> &Document {
        &self.docs[id as usize]
    }

    pub fn document_by_docno(&self, docno: &str) -> Option<&Document> {
        self.doc_id(docno).map(|id| self.document(id))
    }

    pub fn documents(&self) -> &[Document] {
        &self.docs
    }

    /// Stored body text, byte-identical to what was ingested.
    pub fn get_doc_text(&self, docno: &str) -> Result<&str, IndexError> {
        self.document_by_docno(docno)
            .map(|d| d.text.as_str())
            .ok_or_else(|| IndexError::UnknownDocno(docno.into()))
    }

    /// `ln(1 + (N - df + 0.5) / (df + 0.5))`; strictly positive for every df.
    pub fn idf(&self, term: &str) -> f64 {
        crate::scoring::idf(self.num_docs() as u32, self.doc_freq(term))
    }
}
