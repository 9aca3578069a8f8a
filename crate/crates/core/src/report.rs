//! Corpus-level statistics and CSV tables.

use std::collections::BTreeMap;
use std::fs;
use std::io::Read;
use std::path::Path;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::corpus::{normalize_title, Record};
use crate::dedup::CRKey;
use crate::filters::FilterReport;
use crate::fraction::{parse_decimal, rational_to_decimal, Fraction};
use crate::spectroscopy::SpectrumPoint;

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("min_papers must be at least 1")]
    InvalidMinPapers,
    #[error("window start {0} is after its end {1}")]
    BadWindow(i32, i32),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("csv row {row}: {message}")]
    BadRow { row: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JournalRow {
    pub venue: String,
    pub n_papers: u64,
    pub share: Fraction,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JournalTable {
    pub n_records: u64,
    pub rows: Vec<JournalRow>,
    /// Share of the corpus covered by the listed rows.
    pub cumulative_share: Fraction,
}

fn ratio(n: u64, d: u64) -> Fraction {
    if d == 0 {
        Fraction::ZERO
    } else {
        Fraction::new(n, d)
    }
}

/// Venues with at least `min_papers` records, largest first, ties by name.
pub fn journal_table(records: &[Record], min_papers: u64) -> Result<JournalTable, ReportError> {
    if min_papers == 0 {
        return Err(ReportError::InvalidMinPapers);
    }
    let mut counts: BTreeMap<&str, u64> = BTreeMap::new();
    for r in records {
        *counts.entry(r.venue.as_str()).or_insert(0) += 1;
    }
    let n = records.len() as u64;
    let mut rows: Vec<JournalRow> = counts
        .into_iter()
        .filter(|&(_, c)| c >= min_papers)
        .map(|(venue, c)| JournalRow {
            venue: venue.to_string(),
            n_papers: c,
            share: ratio(c, n),
        })
        .collect();
    rows.sort_by(|a, b| b.n_papers.cmp(&a.n_papers).then_with(|| a.venue.cmp(&b.venue)));
    let listed = rows.iter().map(|r| r.n_papers).sum();
    Ok(JournalTable {
        n_records: n,
        rows,
        cumulative_share: ratio(listed, n),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowStats {
    pub y0: i32,
    pub y1: i32,
    pub n_records: u64,
    pub n_in_window: u64,
    pub share_of_corpus: Fraction,
    pub papers_per_year_mean: Fraction,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub venue: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_in_named_venue: Option<u64>,
    /// Share of the window's records published in `venue`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub share_in_named_venue: Option<Fraction>,
}

/// Output statistics for the inclusive year window `[y0, y1]`.
pub fn window_stats(records: &[Record], y0: i32, y1: i32, venue: Option<&str>) -> Result<WindowStats, ReportError> {
    if y0 > y1 {
        return Err(ReportError::BadWindow(y0, y1));
    }
    let inside: Vec<&Record> = records.iter().filter(|r| (y0..=y1).contains(&r.pub_year)).collect();
    let n_in_window = inside.len() as u64;
    let years = (y1 - y0) as u64 + 1;
    let venue = venue.map(normalize_title);
    let n_in_named_venue = venue
        .as_ref()
        .map(|v| inside.iter().filter(|r| &r.venue == v).count() as u64);
    Ok(WindowStats {
        y0,
        y1,
        n_records: records.len() as u64,
        n_in_window,
        share_of_corpus: ratio(n_in_window, records.len() as u64),
        papers_per_year_mean: Fraction::new(n_in_window, years),
        share_in_named_venue: n_in_named_venue.map(|c| ratio(c, n_in_window)),
        n_in_named_venue,
        venue,
    })
}

/// A table that [`export_csv`] can write.
#[derive(Debug, Clone, Copy)]
pub enum Table<'a> {
    Spectrum(&'a [SpectrumPoint]),
    TopKeys(&'a [CRKey]),
    Journals(&'a JournalTable),
    FilterReport(&'a FilterReport),
}

pub const SPECTRUM_HEADER: [&str; 4] = ["RPY", "NCR", "MEDIAN_5", "DEVIATION"];
pub const TOP_KEYS_HEADER: [&str; 5] = ["RPY", "OCCURRENCES", "CLUSTER_ID", "N_VARIANTS", "REFERENCE"];
pub const JOURNALS_HEADER: [&str; 4] = ["VENUE", "N_PAPERS", "N_RECORDS", "SHARE"];
pub const FILTER_REPORT_HEADER: [&str; 3] = ["METRIC", "RPY", "VALUE"];

/// Writes `table` as UTF-8 CSV with a header row and `\n` line endings.
pub fn write_csv(table: Table) -> Result<Vec<u8>, ReportError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    match table {
        Table::Spectrum(points) => {
            w.write_record(SPECTRUM_HEADER)?;
            for p in points {
                w.write_record([
                    p.year.to_string(),
                    p.ncr.to_string(),
                    rational_to_decimal(&p.median5),
                    rational_to_decimal(&p.deviation),
                ])?;
            }
        }
        Table::TopKeys(keys) => {
            w.write_record(TOP_KEYS_HEADER)?;
            for k in keys {
                w.write_record([
                    k.rpy().to_string(),
                    k.occurrences.to_string(),
                    k.cluster_id.clone(),
                    k.variant_raws.len().to_string(),
                    k.representative.raw.clone(),
                ])?;
            }
        }
        Table::Journals(t) => {
            w.write_record(JOURNALS_HEADER)?;
            for r in &t.rows {
                w.write_record([
                    r.venue.clone(),
                    r.n_papers.to_string(),
                    t.n_records.to_string(),
                    r.share.to_decimal_string(),
                ])?;
            }
        }
        Table::FilterReport(r) => {
            w.write_record(FILTER_REPORT_HEADER)?;
            let scalar = [
                ("input_keys", r.input_keys.to_string()),
                ("removed_by_share", r.removed_by_share.to_string()),
                ("removed_as_self", r.removed_as_self.to_string()),
                ("output_keys", r.output_keys.to_string()),
                ("min_share", r.min_share.to_exact_string()),
                ("removed_self_occurrences", r.removed_self_occurrences.to_string()),
            ];
            for (name, value) in scalar {
                w.write_record([name, "", &value])?;
            }
            if let Some(n) = r.self_below_threshold {
                w.write_record(["self_below_threshold", "", &n.to_string()])?;
            }
            for (year, total) in &r.per_rpy_totals {
                w.write_record(["year_total", &year.to_string(), &total.to_string()])?;
            }
        }
    }
    w.into_inner().map_err(|e| ReportError::Io(e.into_error()))
}

/// Writes `table` to `path` and returns the byte count.
pub fn export_csv(table: Table, path: &Path) -> Result<u64, ReportError> {
    let bytes = write_csv(table)?;
    fs::write(path, &bytes)?;
    Ok(bytes.len() as u64)
}

/// One row of a top-keys CSV.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TopKeyRow {
    pub rpy: i32,
    pub occurrences: u64,
    pub cluster_id: String,
    pub n_variants: usize,
    pub reference: String,
}

impl From<&CRKey> for TopKeyRow {
    fn from(k: &CRKey) -> Self {
        TopKeyRow {
            rpy: k.rpy(),
            occurrences: k.occurrences,
            cluster_id: k.cluster_id.clone(),
            n_variants: k.variant_raws.len(),
            reference: k.representative.raw.clone(),
        }
    }
}

fn rows<R: Read>(reader: R, header: &[&str]) -> Result<Vec<csv::StringRecord>, ReportError> {
    let mut r = csv::Reader::from_reader(reader);
    let found: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if found != header {
        return Err(ReportError::BadRow {
            row: 1,
            message: format!("expected header {header:?}, found {found:?}"),
        });
    }
    Ok(r.records().collect::<Result<_, _>>()?)
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize, row: usize) -> Result<T, ReportError> {
    let raw = rec.get(i).unwrap_or("");
    raw.parse().map_err(|_| ReportError::BadRow {
        row,
        message: format!("column {} has {raw:?}", i + 1),
    })
}

fn decimal(rec: &csv::StringRecord, i: usize, row: usize) -> Result<Rational64, ReportError> {
    let raw = rec.get(i).unwrap_or("");
    parse_decimal(raw).ok_or_else(|| ReportError::BadRow {
        row,
        message: format!("column {} has {raw:?}", i + 1),
    })
}

pub fn read_spectrum_csv<R: Read>(reader: R) -> Result<Vec<SpectrumPoint>, ReportError> {
    rows(reader, &SPECTRUM_HEADER)?
        .iter()
        .enumerate()
        .map(|(i, rec)| {
            let row = i + 2;
            Ok(SpectrumPoint {
                year: field(rec, 0, row)?,
                ncr: field(rec, 1, row)?,
                median5: decimal(rec, 2, row)?,
                deviation: decimal(rec, 3, row)?,
            })
        })
        .collect()
}

pub fn read_top_keys_csv<R: Read>(reader: R) -> Result<Vec<TopKeyRow>, ReportError> {
    rows(reader, &TOP_KEYS_HEADER)?
        .iter()
        .enumerate()
        .map(|(i, rec)| {
            let row = i + 2;
            Ok(TopKeyRow {
                rpy: field(rec, 0, row)?,
                occurrences: field(rec, 1, row)?,
                cluster_id: field(rec, 2, row)?,
                n_variants: field(rec, 3, row)?,
                reference: field(rec, 4, row)?,
            })
        })
        .collect()
}

/// Reads a journals CSV. Shares are rebuilt exactly from the counts. A table
/// without rows carries no corpus size and reads back with `n_records` 0.
pub fn read_journals_csv<R: Read>(reader: R) -> Result<JournalTable, ReportError> {
    let mut n_records = None;
    let mut table_rows = Vec::new();
    for (i, rec) in rows(reader, &JOURNALS_HEADER)?.iter().enumerate() {
        let row = i + 2;
        let n_papers: u64 = field(rec, 1, row)?;
        let n: u64 = field(rec, 2, row)?;
        n_records = Some(n);
        table_rows.push(JournalRow {
            venue: field(rec, 0, row)?,
            n_papers,
            share: ratio(n_papers, n),
        });
    }
    let n_records = n_records.unwrap_or(0);
    let listed = table_rows.iter().map(|r| r.n_papers).sum();
    Ok(JournalTable {
        n_records,
        rows: table_rows,
        cumulative_share: ratio(listed, n_records),
    })
}

pub fn read_filter_report_csv<R: Read>(reader: R) -> Result<FilterReport, ReportError> {
    let mut report = FilterReport::default();
    for (i, rec) in rows(reader, &FILTER_REPORT_HEADER)?.iter().enumerate() {
        let row = i + 2;
        match rec.get(0).unwrap_or("") {
            "input_keys" => report.input_keys = field(rec, 2, row)?,
            "removed_by_share" => report.removed_by_share = field(rec, 2, row)?,
            "removed_as_self" => report.removed_as_self = field(rec, 2, row)?,
            "output_keys" => report.output_keys = field(rec, 2, row)?,
            "min_share" => report.min_share = field(rec, 2, row)?,
            "removed_self_occurrences" => report.removed_self_occurrences = field(rec, 2, row)?,
            "self_below_threshold" => report.self_below_threshold = Some(field(rec, 2, row)?),
            "year_total" => {
                report.per_rpy_totals.insert(field(rec, 1, row)?, field(rec, 2, row)?);
            }
            other => {
                return Err(ReportError::BadRow {
                    row,
                    message: format!("unknown metric {other:?}"),
                })
            }
        }
    }
    Ok(report)
}
