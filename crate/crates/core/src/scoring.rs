//! Lexical term weighting.
//!
//! A document's score for a query is the sum, over query tokens, of the
//! scorer's weight for that token in the document. Repeated query tokens
//! contribute once per occurrence.

use core::fmt::Debug;

/// Statistics a lexical scorer may consult for one (term, document) pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TermStats {
    pub tf: u32,
    pub df: u32,
    pub doc_len: u32,
    pub avg_doc_len: f64,
    pub num_docs: u32,
}

pub trait Scorer: Debug + Send + Sync {
    /// Weight contributed by one occurrence of a query term.
    fn weight(&self, stats: &TermStats) -> f64;
}

/// `ln(1 + (N - df + 0.5) / (df + 0.5))`
pub fn idf(num_docs: u32, df: u32) -> f64 {
    let n = f64::from(num_docs);
    let df = f64::from(df);
    libm::log(1.0 + (n - df + 0.5) / (df + 0.5))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bm25 {
    pub k1: f64,
    pub b: f64,
}

impl Default for Bm25 {
    fn default() -> Self {
        Self { k1: 1.2, b: 0.75 }
    }
}

impl Scorer for Bm25 {
    fn weight(&self, s: &TermStats) -> f64 {
        if s.tf == 0 {
            return 0.0;
        }
        let tf = f64::from(s.tf);
        let len_ratio = if s.avg_doc_len > 0.0 { f64::from(s.doc_len) / s.avg_doc_len } else { 1.0 };
        let norm = self.k1 * (1.0 - self.b + self.b * len_ratio);
        idf(s.num_docs, s.df) * tf * (self.k1 + 1.0) / (tf + norm)
    }
}

/// Raw term frequency times the BM25 idf.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TfIdf;

impl Scorer for TfIdf {
    fn weight(&self, s: &TermStats) -> f64 {
        f64::from(s.tf) * idf(s.num_docs, s.df)
    }
}
