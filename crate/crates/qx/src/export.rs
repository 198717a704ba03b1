//! Log export for downstream analysis.
//!
//! `jsonl` concatenates queries, results and annotations byte for byte.
//! `csv` writes one row per record under a fixed header; list-valued
//! fields (`results`) are embedded as JSON text.

use std::fs;
use std::io::Write;
use std::path::Path;

use qx_core::{AnnotationRecord, QueryEvent, ResultRecord};

use crate::session_log::{read_jsonl, LogKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ExportFormat {
    Jsonl,
    Csv,
}

pub const CSV_HEADER: [&str; 11] = [
    "log", "session_id", "timestamp_ms", "query", "previous_query", "source", "log_name", "pipeline", "results",
    "docno", "grade",
];

/// Returns the number of records exported.
pub fn export_logs(log_dir: &Path, format: ExportFormat, out: &Path) -> anyhow::Result<usize> {
    match format {
        ExportFormat::Jsonl => {
            let mut file = fs::File::create(out)?;
            let mut count = 0;
            for kind in LogKind::ALL {
                match fs::read(log_dir.join(kind.file_name())) {
                    Ok(bytes) => {
                        count += bytes.split(|&b| b == b'\n').filter(|l| !l.is_empty()).count();
                        file.write_all(&bytes)?;
                    }
                    Err(e) if e.kind() == std::io::ErrorKind::NotFound => {}
                    Err(e) => return Err(e.into()),
                }
            }
            file.sync_all()?;
            Ok(count)
        }
        ExportFormat::Csv => {
            let mut w = csv::Writer::from_path(out)?;
            w.write_record(CSV_HEADER)?;
            let mut count = 0;
            for ev in read_jsonl::<QueryEvent>(&log_dir.join(LogKind::Queries.file_name()))? {
                let ts = ev.timestamp_ms.to_string();
                let prev = ev.previous_query.unwrap_or_default();
                w.write_record([
                    "queries", &ev.session_id, &ts, &ev.query, &prev, ev.source.as_str(), &ev.log_name, "", "", "", "",
                ])?;
                count += 1;
            }
            for rec in read_jsonl::<ResultRecord>(&log_dir.join(LogKind::Results.file_name()))? {
                let ts = rec.timestamp_ms.to_string();
                let results = serde_json::to_string(&rec.results)?;
                w.write_record(["results", &rec.session_id, &ts, &rec.query, "", "", "", &rec.pipeline, &results, "", ""])?;
                count += 1;
            }
            for rec in read_jsonl::<AnnotationRecord>(&log_dir.join(LogKind::Annotations.file_name()))? {
                let ts = rec.timestamp_ms.to_string();
                let grade = rec.grade.value().to_string();
                w.write_record(["annotations", &rec.session_id, &ts, &rec.query, "", "", "", "", "", &rec.docno, &grade])?;
                count += 1;
            }
            w.flush()?;
            Ok(count)
        }
    }
}
