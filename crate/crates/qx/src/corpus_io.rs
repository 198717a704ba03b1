//! JSONL corpus ingestion. One document per line:
//! `{"docno": "...", "text": "...", "lang": "eng", "title": "..."}` with
//! `docno` and `text` required. Blank lines are skipped.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use qx_core::{Corpus, CorpusError, Document};

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("cannot read {path}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("line {line}: malformed record: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}")]
    Invalid { line: usize, source: CorpusError },
    #[error("line {line}: duplicate docno {docno:?}")]
    Duplicate { line: usize, docno: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum CorpusFormat {
    #[default]
    Jsonl,
}

pub fn ingest_corpus(path: &Path, format: CorpusFormat) -> Result<Corpus, IngestError> {
    match format {
        CorpusFormat::Jsonl => ingest_jsonl(path),
    }
}

fn ingest_jsonl(path: &Path) -> Result<Corpus, IngestError> {
    let io_err = |source| IngestError::Io { path: path.to_path_buf(), source };
    let reader = BufReader::new(File::open(path).map_err(io_err)?);
    let mut corpus = Corpus::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(io_err)?;
        if line.trim().is_empty() {
            continue;
        }
        let doc: Document = serde_json::from_str(&line)
            .map_err(|e| IngestError::Malformed { line: line_no, message: e.to_string() })?;
        corpus.push(doc).map_err(|e| match e {
            CorpusError::DuplicateDocno { docno } => IngestError::Duplicate { line: line_no, docno },
            other => IngestError::Invalid { line: line_no, source: other },
        })?;
    }
    Ok(corpus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write(lines: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(lines.as_bytes()).unwrap();
        f
    }

    #[test]
    fn three_documents_in_order() {
        let f = write(
            r#"{"docno":"d1","text":"a"}
{"docno":"d2","text":"b","lang":"fra","title":"T"}
{"docno":"d3","text":"c"}
"#,
        );
        let corpus = ingest_corpus(f.path(), CorpusFormat::Jsonl).unwrap();
        assert_eq!(corpus.len(), 3);
        let d2 = corpus.get("d2").unwrap();
        assert_eq!((d2.lang.as_str(), d2.title.as_deref()), ("fra", Some("T")));
        assert_eq!(corpus.get("d1").unwrap().lang, "eng");
    }

    #[test]
    fn empty_file_is_an_empty_corpus() {
        let f = write("");
        assert!(ingest_corpus(f.path(), CorpusFormat::Jsonl).unwrap().is_empty());
    }

    #[test]
    fn duplicate_reports_docno_and_line() {
        let f = write(
            r#"{"docno":"d1","text":"a"}
{"docno":"d2","text":"b"}
{"docno":"d3","text":"c"}
{"docno":"d1","text":"again"}
"#,
        );
        let err = ingest_corpus(f.path(), CorpusFormat::Jsonl).unwrap_err();
        assert!(matches!(&err, IngestError::Duplicate { line: 4, docno } if docno == "d1"), "{err}");
        assert!(err.to_string().contains("\"d1\"") && err.to_string().contains("line 4"));
    }

    #[test]
    fn malformed_and_missing_fields() {
        let f = write("{\"docno\":\"d1\",\"text\":\"a\"}\nnot json\n");
        assert!(matches!(ingest_corpus(f.path(), CorpusFormat::Jsonl), Err(IngestError::Malformed { line: 2, .. })));
        let f = write("{\"docno\":\"d1\"}\n");
        assert!(matches!(ingest_corpus(f.path(), CorpusFormat::Jsonl), Err(IngestError::Malformed { line: 1, .. })));
        let f = write("{\"docno\":\"d1\",\"text\":\"   \"}\n");
        assert!(matches!(ingest_corpus(f.path(), CorpusFormat::Jsonl), Err(IngestError::Invalid { line: 1, .. })));
    }

    #[test]
    fn missing_file() {
        let err = ingest_corpus(Path::new("/nonexistent/corpus.jsonl"), CorpusFormat::Jsonl).unwrap_err();
        assert!(matches!(err, IngestError::Io { .. }));
    }
}
