//! On-disk index directory.
//!
//! ```text
//! <dir>/manifest.json    format and tokenizer versions, collection statistics
//! <dir>/documents.jsonl  corpus records in document-id order
//! <dir>/postings.jsonl   {"term": str, "postings": [[doc_id, tf], ...]} per line, terms sorted
//! ```

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use qx_core::tokenize::TOKENIZER_VERSION;
use qx_core::{Document, Index, IndexError, Posting};
use serde::{Deserialize, Serialize};

pub const FORMAT_VERSION: u32 = 1;
const MANIFEST: &str = "manifest.json";
const DOCUMENTS: &str = "documents.jsonl";
const POSTINGS: &str = "postings.jsonl";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub format_version: u32,
    pub tokenizer_version: u32,
    pub num_docs: usize,
    pub num_terms: usize,
    pub total_tokens: u64,
    pub avg_doc_length: f64,
}

impl Manifest {
    pub fn of(index: &Index) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            tokenizer_version: TOKENIZER_VERSION,
            num_docs: index.num_docs(),
            num_terms: index.num_terms(),
            total_tokens: index.total_tokens(),
            avg_doc_length: index.avg_doc_length(),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct TermLine {
    term: String,
    postings: Vec<(u32, u32)>,
}

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("{path}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}:{line}: {message}")]
    Parse { path: PathBuf, line: usize, message: String },
    #[error("unsupported index format {found} (expected {FORMAT_VERSION})")]
    Format { found: u32 },
    #[error("index built with tokenizer v{found}, this build uses v{TOKENIZER_VERSION}; rebuild the index")]
    Tokenizer { found: u32 },
    #[error("manifest disagrees with index data: {0}")]
    Mismatch(String),
    #[error(transparent)]
    Index(#[from] IndexError),
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> StoreError + '_ {
    move |source| StoreError::Io { path: path.to_path_buf(), source }
}

pub fn save(index: &Index, dir: &Path) -> Result<Manifest, StoreError> {
    fs::create_dir_all(dir).map_err(io(dir))?;

    let path = dir.join(DOCUMENTS);
    let mut w = BufWriter::new(File::create(&path).map_err(io(&path))?);
    for doc in index.documents() {
        serde_json::to_writer(&mut w, doc).expect("documents serialize");
        w.write_all(b"\n").map_err(io(&path))?;
    }
    w.flush().map_err(io(&path))?;

    let path = dir.join(POSTINGS);
    let mut w = BufWriter::new(File::create(&path).map_err(io(&path))?);
    for (term, list) in index.terms() {
        let line = TermLine { term: term.into(), postings: list.iter().map(|p| (p.doc, p.tf)).collect() };
        serde_json::to_writer(&mut w, &line).expect("postings serialize");
        w.write_all(b"\n").map_err(io(&path))?;
    }
    w.flush().map_err(io(&path))?;

    let manifest = Manifest::of(index);
    let path = dir.join(MANIFEST);
    let body = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    fs::write(&path, body + "\n").map_err(io(&path))?;
    Ok(manifest)
}

pub fn read_manifest(dir: &Path) -> Result<Manifest, StoreError> {
    let path = dir.join(MANIFEST);
    let body = fs::read_to_string(&path).map_err(io(&path))?;
    serde_json::from_str(&body).map_err(|e| StoreError::Parse { path, line: e.line(), message: e.to_string() })
}

fn read_lines<T: serde::de::DeserializeOwned>(path: &Path) -> Result<Vec<T>, StoreError> {
    let reader = BufReader::new(File::open(path).map_err(io(path))?);
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(io(path))?;
        let item = serde_json::from_str(&line).map_err(|e| StoreError::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            message: e.to_string(),
        })?;
        out.push(item);
    }
    Ok(out)
}

pub fn load(dir: &Path) -> Result<Index, StoreError> {
    let manifest = read_manifest(dir)?;
    if manifest.format_version != FORMAT_VERSION {
        return Err(StoreError::Format { found: manifest.format_version });
    }
    if manifest.tokenizer_version != TOKENIZER_VERSION {
        return Err(StoreError::Tokenizer { found: manifest.tokenizer_version });
    }
    let docs: Vec<Document> = read_lines(&dir.join(DOCUMENTS))?;
    let lines: Vec<TermLine> = read_lines(&dir.join(POSTINGS))?;
    let mut postings = BTreeMap::new();
    for line in lines {
        let list = line.postings.into_iter().map(|(doc, tf)| Posting { doc, tf }).collect();
        if postings.insert(line.term.clone(), list).is_some() {
            return Err(StoreError::Mismatch(format!("term {:?} listed twice", line.term)));
        }
    }
    let index = Index::from_parts(docs, postings)?;
    let actual = Manifest::of(&index);
    if actual.num_docs != manifest.num_docs
        || actual.num_terms != manifest.num_terms
        || actual.total_tokens != manifest.total_tokens
    {
        return Err(StoreError::Mismatch(format!("manifest {manifest:?}, data {actual:?}")));
    }
    Ok(index)
}
