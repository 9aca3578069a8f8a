//! Source records, cited-reference parsing and the canonical corpus file.

mod author;
mod cr;
mod export;
mod store;

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use author::{normalize_author, AuthorName};
pub use cr::{normalize_title, parse_cr_string, CitedReference};
pub use export::{parse_export, parse_export_str, write_export, ParsedExport};
pub use store::{load_corpus, save_corpus, CORPUS_SCHEMA, CORPUS_VERSION};

/// Earliest publication year or RPY accepted.
pub const MIN_YEAR: i32 = 1500;
/// Latest publication year or RPY accepted.
pub const MAX_YEAR: i32 = 2100;

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("input is not valid UTF-8 (byte offset {0})")]
    UnreadableStream(usize),
    #[error("no records found; check the export format")]
    NoRecordsFound,
    #[error("empty cited reference {0:?}")]
    MalformedCr(String),
    #[error("no name in {0:?}")]
    EmptyName(String),
    #[error("corpus schema {found} is not supported (expected {expected})")]
    SchemaVersionMismatch { found: String, expected: String },
    #[error("corpus file line {line}: {message}")]
    Corrupt { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Export flavors accepted by [`parse_export`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExportFormat {
    /// Two-letter field tags at line start, indented continuation lines.
    TaggedPlaintext,
    /// Header row of field tags, then one record per tab-separated row.
    TabDelimited,
}

impl std::str::FromStr for ExportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "tagged" | "tagged_plaintext" | "plaintext" => Ok(ExportFormat::TaggedPlaintext),
            "tab" | "tab_delimited" | "tsv" => Ok(ExportFormat::TabDelimited),
            other => Err(format!("unknown export format {other:?} (use tagged or tab)")),
        }
    }
}

/// One source publication.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Record {
    pub record_id: String,
    pub authors: Vec<AuthorName>,
    pub pub_year: i32,
    pub venue: String,
    pub cited_refs: Vec<CitedReference>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub times_cited: Option<u64>,
}

/// Something skipped or dropped while reading an export.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseWarning {
    /// 1-based line of the offending field or row.
    pub line: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub record_id: Option<String>,
    pub message: String,
}

impl fmt::Display for ParseWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.record_id {
            Some(id) => write!(f, "line {} ({id}): {}", self.line, self.message),
            None => write!(f, "line {}: {}", self.line, self.message),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub n_records: u64,
    pub n_cr_occurrences: u64,
    /// Distinct verbatim CR strings.
    pub n_distinct_crs: u64,
    pub year_span: Option<(i32, i32)>,
    pub rpy_span: Option<(i32, i32)>,
}

impl CorpusStats {
    pub fn compute(records: &[Record]) -> Self {
        let mut raws: HashSet<&str> = HashSet::new();
        let mut stats = CorpusStats {
            n_records: records.len() as u64,
            ..Default::default()
        };
        for r in records {
            stats.year_span = Some(widen(stats.year_span, r.pub_year));
            for cr in &r.cited_refs {
                stats.n_cr_occurrences += 1;
                raws.insert(&cr.raw);
                if let Some(y) = cr.rpy {
                    stats.rpy_span = Some(widen(stats.rpy_span, y));
                }
            }
        }
        stats.n_distinct_crs = raws.len() as u64;
        stats
    }
}

fn widen(span: Option<(i32, i32)>, y: i32) -> (i32, i32) {
    match span {
        Some((lo, hi)) => (lo.min(y), hi.max(y)),
        None => (y, y),
    }
}
