//! Cited-reference strings in the `AUTHOR, YEAR, SOURCE, Vn, Pn, DOI x` shape.
//!
//! The grammar is positional around the year segment. Segments are split on
//! `", "`; a standalone four-digit year in range sets the RPY, `V<digits>`,
//! `P<alphanumeric>` and `DOI <rest>` are tagged, the first segment before the
//! year is the first author and the first untagged segment after the year is
//! the source. Anything else is ignored.

use serde::{Deserialize, Serialize};

use super::author::normalize_author;
use super::{IngestError, MAX_YEAR, MIN_YEAR};

/// One parsed cited-reference occurrence.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CitedReference {
    /// Verbatim input, never rewritten.
    pub raw: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub first_author: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rpy: Option<i32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub volume: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub page: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub doi: Option<String>,
}

impl AsRef<CitedReference> for CitedReference {
    fn as_ref(&self) -> &CitedReference {
        self
    }
}

impl CitedReference {
    /// Re-serializes the structured fields in canonical order. Parsing the
    /// result yields the same structured fields.
    pub fn canonical_string(&self) -> String {
        let mut parts: Vec<String> = Vec::new();
        if let Some(a) = &self.first_author {
            parts.push(a.clone());
        }
        if let Some(y) = self.rpy {
            parts.push(y.to_string());
        }
        if let Some(s) = &self.source {
            parts.push(s.clone());
        }
        if let Some(v) = &self.volume {
            parts.push(format!("V{v}"));
        }
        if let Some(p) = &self.page {
            parts.push(format!("P{p}"));
        }
        if let Some(d) = &self.doi {
            parts.push(format!("DOI {d}"));
        }
        parts.join(", ")
    }

    /// Same structured fields, ignoring `raw`.
    pub fn same_fields(&self, other: &CitedReference) -> bool {
        self.first_author == other.first_author
            && self.rpy == other.rpy
            && self.source == other.source
            && self.volume == other.volume
            && self.page == other.page
            && self.doi == other.doi
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Segment {
    Year(i32),
    Volume,
    Page,
    Doi,
    Plain,
}

fn classify(seg: &str) -> Segment {
    if seg.len() == 4 && seg.bytes().all(|b| b.is_ascii_digit()) {
        let y: i32 = seg.parse().unwrap_or(0);
        if (MIN_YEAR..=MAX_YEAR).contains(&y) {
            return Segment::Year(y);
        }
        return Segment::Plain;
    }
    if let Some(rest) = strip_prefix_ci(seg, "DOI ") {
        if !rest.trim().is_empty() {
            return Segment::Doi;
        }
    }
    if let Some(rest) = strip_prefix_ci(seg, "V") {
        if !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()) {
            return Segment::Volume;
        }
    }
    if let Some(rest) = strip_prefix_ci(seg, "P") {
        // a page needs a digit, so words such as PRESS stay plain
        if !rest.is_empty()
            && rest.chars().all(|c| c.is_ascii_alphanumeric())
            && rest.chars().any(|c| c.is_ascii_digit())
        {
            return Segment::Page;
        }
    }
    Segment::Plain
}

fn strip_prefix_ci<'a>(s: &'a str, prefix: &str) -> Option<&'a str> {
    let head = s.get(..prefix.len())?;
    head.eq_ignore_ascii_case(prefix).then(|| &s[prefix.len()..])
}

/// Uppercases and collapses internal whitespace.
pub fn normalize_title(s: &str) -> String {
    s.split_whitespace()
        .map(|w| w.to_uppercase())
        .collect::<Vec<_>>()
        .join(" ")
}

fn normalize_first_author(seg: &str) -> String {
    match normalize_author(seg) {
        Ok(name) => {
            let shown = name.to_string();
            if !shown.contains(',') {
                return shown;
            }
            // keep the segment comma-free so it survives re-serialization
            normalize_author(&name.cr_form())
                .map(|n| n.to_string())
                .unwrap_or(shown)
        }
        Err(_) => normalize_title(seg),
    }
}

/// Parses one cited-reference string. Total for every non-blank input.
pub fn parse_cr_string(raw: &str) -> Result<CitedReference, IngestError> {
    if raw.trim().is_empty() {
        return Err(IngestError::MalformedCr(raw.to_string()));
    }
    let segments: Vec<&str> = raw.split(", ").map(str::trim).filter(|s| !s.is_empty()).collect();
    // classify the normalized form so re-serialized fields classify the same
    let normalized: Vec<String> = segments.iter().map(|s| normalize_title(s)).collect();
    let kinds: Vec<Segment> = normalized.iter().map(|s| classify(s)).collect();

    let mut cr = CitedReference {
        raw: raw.to_string(),
        first_author: None,
        rpy: None,
        source: None,
        volume: None,
        page: None,
        doi: None,
    };

    let year_at = kinds.iter().position(|k| matches!(k, Segment::Year(_)));
    if let Some(i) = year_at {
        if let Segment::Year(y) = kinds[i] {
            cr.rpy = Some(y);
        }
    }

    // first author: the leading segment, when it is plain and precedes the year
    let author_at = match kinds.first() {
        Some(Segment::Plain) if year_at.is_none_or(|y| y > 0) => Some(0),
        _ => None,
    };
    if let Some(i) = author_at {
        let name = normalize_first_author(segments[i]);
        if !name.is_empty() {
            cr.first_author = Some(name);
        }
    }

    let source_from = match (year_at, author_at) {
        (Some(y), _) => y + 1,
        (None, Some(a)) => a + 1,
        (None, None) => 0,
    };

    for (i, kind) in kinds.iter().enumerate() {
        let norm = &normalized[i];
        match kind {
            Segment::Volume if cr.volume.is_none() => cr.volume = Some(norm[1..].to_string()),
            Segment::Page if cr.page.is_none() => cr.page = Some(norm[1..].to_string()),
            Segment::Doi if cr.doi.is_none() => {
                let value: String = segments[i].chars().skip(3).collect();
                cr.doi = Some(value.trim().to_string());
            }
            Segment::Plain if i >= source_from && cr.source.is_none() && !norm.is_empty() => {
                cr.source = Some(norm.clone());
            }
            _ => {}
        }
    }
    Ok(cr)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn some(s: &str) -> Option<String> {
        Some(s.to_string())
    }

    #[test]
    fn science_1955_row() {
        let cr = parse_cr_string("GARFIELD E, 1955, SCIENCE, V122, P108").unwrap();
        assert_eq!(cr.first_author, some("GARFIELD E"));
        assert_eq!(cr.rpy, Some(1955));
        assert_eq!(cr.source, some("SCIENCE"));
        assert_eq!(cr.volume, some("122"));
        assert_eq!(cr.page, some("108"));
        assert_eq!(cr.doi, None);
    }

    #[test]
    fn current_contents_without_volume() {
        let cr = parse_cr_string("GARFIELD E, 1971, CURR CONTENTS, P5").unwrap();
        assert_eq!(cr.volume, None);
        assert_eq!(cr.page, some("5"));
        assert_eq!(cr.source, some("CURR CONTENTS"));
    }

    #[test]
    fn no_year_segment() {
        let cr = parse_cr_string("SOME REPORT, UNNUMBERED").unwrap();
        assert_eq!(cr.rpy, None);
        assert_eq!(cr.first_author, some("SOME REPORT"));
        assert_eq!(cr.source, some("UNNUMBERED"));
    }

    #[test]
    fn embedded_years_do_not_set_rpy() {
        let cr = parse_cr_string("WELLS HG, WORLD BRAIN 1938 ED").unwrap();
        assert_eq!(cr.rpy, None);
        assert_eq!(cr.source, some("WORLD BRAIN 1938 ED"));
    }

    #[test]
    fn extra_untagged_segments_are_ignored() {
        let cr = parse_cr_string("GARFIELD E, 1972, CURR CONTENTS, 1101, P5").unwrap();
        assert_eq!(cr.source, some("CURR CONTENTS"));
        assert_eq!(cr.volume, None);
        assert_eq!(cr.page, some("5"));
    }

    #[test]
    fn words_starting_with_p_or_v_are_not_tags() {
        let cr = parse_cr_string("BRADFORD SC, 1950, PUBLIC AFFAIRS PRESS").unwrap();
        assert_eq!(cr.source, some("PUBLIC AFFAIRS PRESS"));
        assert_eq!(cr.page, None);
        let cr = parse_cr_string("X Y, 1990, VOX").unwrap();
        assert_eq!(cr.volume, None);
        assert_eq!(cr.source, some("VOX"));
    }

    #[test]
    fn doi_and_out_of_range_year() {
        let cr = parse_cr_string("PUDOVKIN AI, 2002, J AM SOC INF SCI TEC, V53, P1113, DOI 10.1002/asi.10153").unwrap();
        assert_eq!(cr.doi, some("10.1002/asi.10153"));
        let cr = parse_cr_string("ANON, 1234, SOMETHING").unwrap();
        assert_eq!(cr.rpy, None);
    }

    #[test]
    fn leading_year_means_no_author() {
        let cr = parse_cr_string("1955, SCIENCE, V122").unwrap();
        assert_eq!(cr.first_author, None);
        assert_eq!(cr.source, some("SCIENCE"));
        assert_eq!(cr.volume, some("122"));
    }

    #[test]
    fn raw_is_kept_verbatim() {
        let raw = "  Garfield E,  1955, Science ";
        let cr = parse_cr_string(raw).unwrap();
        assert_eq!(cr.raw, raw);
        assert_eq!(cr.first_author, some("GARFIELD E"));
        assert_eq!(cr.source, some("SCIENCE"));
    }

    #[test]
    fn blank_strings_are_malformed() {
        assert!(matches!(parse_cr_string("   "), Err(IngestError::MalformedCr(_))));
        assert!(matches!(parse_cr_string(""), Err(IngestError::MalformedCr(_))));
    }

    #[test]
    fn canonical_string_reparses_to_same_fields() {
        let cr = parse_cr_string("lowry o. h., 1951, j biol chem, v193, p265").unwrap();
        let again = parse_cr_string(&cr.canonical_string()).unwrap();
        assert!(cr.same_fields(&again), "{cr:?} vs {again:?}");
    }
}
