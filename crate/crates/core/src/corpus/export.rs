//! Readers for the two export flavors. Both reduce to the same tag/value
//! items before records are built, so equivalent content yields identical
//! records.

use std::collections::{BTreeSet, HashSet};
use std::io::Read;

use super::author::normalize_author;
use super::cr::{normalize_title, parse_cr_string};
use super::{ExportFormat, IngestError, ParseWarning, Record, MAX_YEAR, MIN_YEAR};

/// Records and warnings from one export stream.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParsedExport {
    pub records: Vec<Record>,
    pub warnings: Vec<ParseWarning>,
}

const RECORD_TAGS: [&str; 7] = ["PT", "UT", "AU", "PY", "SO", "CR", "TC"];
const FILE_TAGS: [&str; 4] = ["FN", "VR", "ER", "EF"];

#[derive(Debug, Default)]
struct RawItem {
    line: usize,
    fields: Vec<(String, usize, String)>,
}

impl RawItem {
    fn values<'a>(&'a self, tag: &'a str) -> impl Iterator<Item = (usize, &'a str)> + 'a {
        self.fields
            .iter()
            .filter(move |(t, _, _)| t == tag)
            .map(|(_, line, v)| (*line, v.as_str()))
    }

    fn first<'a>(&'a self, tag: &'a str) -> Option<(usize, &'a str)> {
        self.values(tag)
            .map(|(l, v)| (l, v.trim()))
            .find(|(_, v)| !v.is_empty())
    }
}

/// Reads an export from a byte stream. A leading byte-order mark is ignored.
pub fn parse_export<R: Read>(mut reader: R, format: ExportFormat) -> Result<ParsedExport, IngestError> {
    let mut bytes = Vec::new();
    reader.read_to_end(&mut bytes)?;
    let text = std::str::from_utf8(&bytes).map_err(|e| IngestError::UnreadableStream(e.valid_up_to()))?;
    parse_export_str(text, format)
}

pub fn parse_export_str(text: &str, format: ExportFormat) -> Result<ParsedExport, IngestError> {
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let mut warnings = Vec::new();
    let items = match format {
        ExportFormat::TaggedPlaintext => tagged_items(text, &mut warnings),
        ExportFormat::TabDelimited => tab_items(text, &mut warnings),
    };
    if items.is_empty() {
        return Err(IngestError::NoRecordsFound);
    }
    let mut seen = HashSet::new();
    let records = items
        .iter()
        .filter_map(|item| build_record(item, &mut seen, &mut warnings))
        .collect();
    Ok(ParsedExport { records, warnings })
}

fn split_tag(line: &str) -> Option<(&str, &str)> {
    let tag = line.get(..2)?;
    if !tag.bytes().all(|b| b.is_ascii_uppercase() || b.is_ascii_digit()) {
        return None;
    }
    let rest = &line[2..];
    if rest.is_empty() {
        return Some((tag, ""));
    }
    rest.strip_prefix(' ').map(|v| (tag, v))
}

fn tagged_items(text: &str, warnings: &mut Vec<ParseWarning>) -> Vec<RawItem> {
    let mut items = Vec::new();
    let mut current: Option<RawItem> = None;
    // tag that indented continuation lines belong to; None while skipping
    let mut open_tag: Option<&str> = None;
    let mut unknown = BTreeSet::new();
    let mut stray = 0usize;
    let mut first_stray = 0usize;

    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        if line.starts_with(char::is_whitespace) {
            if let (Some(tag), Some(item)) = (open_tag, current.as_mut()) {
                item.fields.push((tag.to_string(), lineno, line.trim().to_string()));
            }
            continue;
        }
        let Some((tag, value)) = split_tag(line) else {
            stray += 1;
            if first_stray == 0 {
                first_stray = lineno;
            }
            open_tag = None;
            continue;
        };
        open_tag = None;
        match tag {
            "FN" | "VR" => {}
            "ER" | "EF" => {
                if let Some(item) = current.take() {
                    items.push(item);
                }
            }
            _ => {
                if tag == "PT" {
                    if let Some(item) = current.take() {
                        items.push(item);
                    }
                }
                let item = current.get_or_insert_with(|| RawItem {
                    line: lineno,
                    fields: Vec::new(),
                });
                if RECORD_TAGS.contains(&tag) {
                    item.fields.push((tag.to_string(), lineno, value.trim().to_string()));
                    open_tag = Some(tag);
                } else if unknown.insert(tag.to_string()) {
                    warnings.push(ParseWarning {
                        line: lineno,
                        record_id: None,
                        message: format!("unknown field tag {tag} skipped"),
                    });
                }
            }
        }
    }
    if let Some(item) = current.take() {
        items.push(item);
    }
    if stray > 0 {
        warnings.push(ParseWarning {
            line: first_stray,
            record_id: None,
            message: format!("{stray} line(s) without a field tag skipped"),
        });
    }
    items
}

fn tab_items(text: &str, warnings: &mut Vec<ParseWarning>) -> Vec<RawItem> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(b'\t')
        .has_headers(false)
        .flexible(true)
        .quoting(false)
        .from_reader(text.as_bytes());
    let mut rows = reader.records();
    let header: Vec<String> = match rows.next() {
        Some(Ok(h)) => h.iter().map(|c| c.trim().to_string()).collect(),
        _ => return Vec::new(),
    };
    let mut columns: Vec<Option<&'static str>> = Vec::with_capacity(header.len());
    for name in &header {
        let known = RECORD_TAGS.iter().find(|t| **t == name.as_str()).copied();
        if known.is_none() && !name.is_empty() && !FILE_TAGS.contains(&name.as_str()) {
            warnings.push(ParseWarning {
                line: 1,
                record_id: None,
                message: format!("unknown field tag {name} skipped"),
            });
        }
        columns.push(known);
    }
    if columns.iter().all(Option::is_none) {
        return Vec::new();
    }

    let mut items = Vec::new();
    for row in rows {
        let Ok(row) = row else { continue };
        let lineno = row.position().map_or(0, |p| p.line() as usize);
        if row.iter().all(|c| c.trim().is_empty()) {
            continue;
        }
        let mut item = RawItem {
            line: lineno,
            fields: Vec::new(),
        };
        for (cell, col) in row.iter().zip(&columns) {
            if let Some(tag) = col {
                item.fields.push((tag.to_string(), lineno, cell.trim().to_string()));
            }
        }
        items.push(item);
    }
    items
}

fn build_record(item: &RawItem, seen: &mut HashSet<String>, warnings: &mut Vec<ParseWarning>) -> Option<Record> {
    let warn = |warnings: &mut Vec<ParseWarning>, line: usize, id: Option<&str>, message: String| {
        warnings.push(ParseWarning {
            line,
            record_id: id.map(str::to_string),
            message,
        })
    };

    let Some((_, id)) = item.first("UT") else {
        warn(warnings, item.line, None, "record without an id (UT) dropped".into());
        return None;
    };
    let id = id.to_string();
    if seen.contains(&id) {
        warn(warnings, item.line, Some(&id), "duplicate record id dropped".into());
        return None;
    }

    let pub_year = match item.first("PY") {
        None => {
            warn(
                warnings,
                item.line,
                Some(&id),
                "record without a publication year (PY) dropped".into(),
            );
            return None;
        }
        Some((line, v)) => match v.parse::<i32>() {
            Ok(y) if (MIN_YEAR..=MAX_YEAR).contains(&y) => y,
            _ => {
                warn(
                    warnings,
                    line,
                    Some(&id),
                    format!("publication year {v:?} out of range; record dropped"),
                );
                return None;
            }
        },
    };

    let mut authors = Vec::new();
    for (line, value) in item.values("AU") {
        for part in value.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            match normalize_author(part) {
                Ok(a) => authors.push(a),
                Err(e) => warn(warnings, line, Some(&id), e.to_string()),
            }
        }
    }

    let venue_parts: Vec<&str> = item.values("SO").map(|(_, v)| v).collect();
    let venue = normalize_title(&venue_parts.join(" "));

    let mut cited_refs = Vec::new();
    for (line, value) in item.values("CR") {
        for part in value.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            match parse_cr_string(part) {
                Ok(cr) => cited_refs.push(cr),
                Err(e) => warn(warnings, line, Some(&id), e.to_string()),
            }
        }
    }

    let times_cited = match item.first("TC") {
        None => None,
        Some((line, v)) => match v.parse::<u64>() {
            Ok(n) => Some(n),
            Err(_) => {
                warn(
                    warnings,
                    line,
                    Some(&id),
                    format!("times cited {v:?} is not a count; ignored"),
                );
                None
            }
        },
    };

    seen.insert(id.clone());
    Some(Record {
        record_id: id,
        authors,
        pub_year,
        venue,
        cited_refs,
        times_cited,
    })
}

/// Renders records in either export flavor. Reading the output back gives
/// the same records, provided CR strings carry no `;`, no line breaks and no
/// surrounding whitespace.
pub fn write_export(records: &[Record], format: ExportFormat) -> String {
    let mut out = String::new();
    match format {
        ExportFormat::TaggedPlaintext => {
            out.push_str("FN Export\nVR 1.0\n");
            for r in records {
                out.push_str("PT J\n");
                push_block(&mut out, "AU", r.authors.iter().map(|a| a.to_string()));
                out.push_str(&format!("SO {}\nPY {}\n", r.venue, r.pub_year));
                push_block(&mut out, "CR", r.cited_refs.iter().map(|c| c.raw.clone()));
                if let Some(tc) = r.times_cited {
                    out.push_str(&format!("TC {tc}\n"));
                }
                out.push_str(&format!("UT {}\nER\n\n", r.record_id));
            }
            out.push_str("EF\n");
        }
        ExportFormat::TabDelimited => {
            out.push_str("PT\tAU\tSO\tPY\tCR\tTC\tUT\n");
            for r in records {
                let authors: Vec<String> = r.authors.iter().map(|a| a.to_string()).collect();
                let crs: Vec<&str> = r.cited_refs.iter().map(|c| c.raw.as_str()).collect();
                let tc = r.times_cited.map(|t| t.to_string()).unwrap_or_default();
                out.push_str(&format!(
                    "J\t{}\t{}\t{}\t{}\t{}\t{}\n",
                    authors.join("; "),
                    r.venue,
                    r.pub_year,
                    crs.join("; "),
                    tc,
                    r.record_id
                ));
            }
        }
    }
    out
}

fn push_block(out: &mut String, tag: &str, values: impl Iterator<Item = String>) {
    for (i, v) in values.enumerate() {
        out.push_str(if i == 0 { tag } else { "  " });
        out.push(' ');
        out.push_str(&v);
        out.push('\n');
    }
}
