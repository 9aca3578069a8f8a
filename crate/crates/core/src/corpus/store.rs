//! The canonical corpus file: a JSON header line followed by one JSON record
//! per line. See `docs/corpus-format.md`.

use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{CorpusStats, IngestError, Record};

pub const CORPUS_SCHEMA: &str = "rpys-corpus";
pub const CORPUS_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct Header {
    schema: String,
    version: u32,
    stats: CorpusStats,
}

/// Writes the corpus atomically (temp file, then rename) and returns its stats.
pub fn save_corpus(records: &[Record], path: &Path) -> Result<CorpusStats, IngestError> {
    let stats = CorpusStats::compute(records);
    let tmp = temp_path(path);
    {
        let mut out = BufWriter::new(File::create(&tmp)?);
        let header = Header {
            schema: CORPUS_SCHEMA.to_string(),
            version: CORPUS_VERSION,
            stats: stats.clone(),
        };
        serde_json::to_writer(&mut out, &header).map_err(std::io::Error::from)?;
        out.write_all(b"\n")?;
        for r in records {
            serde_json::to_writer(&mut out, r).map_err(std::io::Error::from)?;
            out.write_all(b"\n")?;
        }
        out.into_inner().map_err(|e| e.into_error())?.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(stats)
}

pub fn load_corpus(path: &Path) -> Result<Vec<Record>, IngestError> {
    let reader = BufReader::new(File::open(path)?);
    let mut lines = reader.lines();
    let header_line = match lines.next() {
        Some(l) => l?,
        None => {
            return Err(IngestError::Corrupt {
                line: 1,
                message: "missing header".into(),
            })
        }
    };
    let header: Header = serde_json::from_str(&header_line).map_err(|e| IngestError::Corrupt {
        line: 1,
        message: e.to_string(),
    })?;
    if header.schema != CORPUS_SCHEMA || header.version != CORPUS_VERSION {
        return Err(IngestError::SchemaVersionMismatch {
            found: format!("{} v{}", header.schema, header.version),
            expected: format!("{CORPUS_SCHEMA} v{CORPUS_VERSION}"),
        });
    }

    let mut records = Vec::with_capacity(header.stats.n_records as usize);
    for (idx, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: Record = serde_json::from_str(&line).map_err(|e| IngestError::Corrupt {
            line: idx + 2,
            message: e.to_string(),
        })?;
        records.push(record);
    }
    if CorpusStats::compute(&records) != header.stats {
        return Err(IngestError::Corrupt {
            line: 1,
            message: "header stats do not match the records".into(),
        });
    }
    Ok(records)
}

fn temp_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".tmp");
    path.with_file_name(name)
}
