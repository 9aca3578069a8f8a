//! Per-year occurrence-share threshold and first-author self-citation
//! removal, and the two dataset recipes built from them.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::corpus::{normalize_author, AuthorName};
use crate::dedup::CRKey;
use crate::fraction::{cmp_ratio, Fraction};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FilterError {
    #[error("no occurrence total for RPY {0}")]
    MissingYearTotal(i32),
    #[error("self-citation removal needs a self author")]
    MissingSelfAuthor,
    #[error("min share {0} is outside [0, 1]")]
    InvalidShare(Fraction),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub min_share_per_rpy: Fraction,
    pub remove_self_citations: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub self_author: Option<AuthorName>,
    pub recompute_shares_after_self_removal: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            min_share_per_rpy: Fraction::new(1, 10),
            remove_self_citations: false,
            self_author: None,
            recompute_shares_after_self_removal: true,
        }
    }
}

impl PipelineConfig {
    /// Share threshold only.
    pub fn dataset1() -> Self {
        Self::default()
    }

    /// Self-citations removed first, then the share threshold.
    pub fn dataset2(self_author: AuthorName) -> Self {
        PipelineConfig {
            remove_self_citations: true,
            self_author: Some(self_author),
            ..Self::default()
        }
    }
}

/// Bookkeeping for one filter run. `input_keys` always equals
/// `output_keys + removed_by_share + removed_as_self`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct FilterReport {
    pub input_keys: usize,
    pub removed_by_share: usize,
    pub removed_as_self: usize,
    pub output_keys: usize,
    /// Occurrence totals used as share denominators.
    pub per_rpy_totals: BTreeMap<i32, u64>,
    pub min_share: Fraction,
    /// Occurrences carried by the self-cited keys removed.
    pub removed_self_occurrences: u64,
    /// Self-cited keys the threshold alone would also have removed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub self_below_threshold: Option<usize>,
}

/// Occurrence totals per RPY.
pub fn year_totals(keys: &[CRKey]) -> BTreeMap<i32, u64> {
    let mut totals = BTreeMap::new();
    for k in keys {
        *totals.entry(k.rpy()).or_insert(0) += k.occurrences;
    }
    totals
}

/// The key's occurrences over its year's total.
pub fn share_in_year(key: &CRKey, per_rpy_totals: &BTreeMap<i32, u64>) -> Result<Fraction, FilterError> {
    match per_rpy_totals.get(&key.rpy()) {
        Some(&total) if total >= key.occurrences && total > 0 => Ok(Fraction::new(key.occurrences, total)),
        _ => Err(FilterError::MissingYearTotal(key.rpy())),
    }
}

fn below(key: &CRKey, totals: &BTreeMap<i32, u64>, min_share: Fraction) -> bool {
    let total = totals.get(&key.rpy()).copied().unwrap_or(0);
    // strict: a share exactly at the threshold survives
    total > 0 && cmp_ratio(key.occurrences, total, min_share) == Ordering::Less
}

/// Removes keys whose share of their year is strictly below `min_share`,
/// with denominators taken over `keys` itself.
pub fn apply_share_threshold(keys: Vec<CRKey>, min_share: Fraction) -> (Vec<CRKey>, Vec<CRKey>, FilterReport) {
    let totals = year_totals(&keys);
    threshold_with_totals(keys, totals, min_share)
}

fn threshold_with_totals(
    keys: Vec<CRKey>,
    totals: BTreeMap<i32, u64>,
    min_share: Fraction,
) -> (Vec<CRKey>, Vec<CRKey>, FilterReport) {
    let input_keys = keys.len();
    let (removed, kept): (Vec<CRKey>, Vec<CRKey>) = keys.into_iter().partition(|k| below(k, &totals, min_share));
    let report = FilterReport {
        input_keys,
        removed_by_share: removed.len(),
        output_keys: kept.len(),
        per_rpy_totals: totals,
        min_share,
        ..Default::default()
    };
    (kept, removed, report)
}

/// True when the key's first author is `self_author` by last name and first
/// initial.
pub fn is_self_citation(key: &CRKey, self_author: &AuthorName) -> bool {
    key.representative
        .first_author
        .as_deref()
        .and_then(|a| normalize_author(a).ok())
        .is_some_and(|a| a.matches_first_initial(self_author))
}

/// Splits off self-cited keys. Returns kept, removed and the removed
/// occurrence count.
pub fn filter_self_citations(keys: Vec<CRKey>, self_author: &AuthorName) -> (Vec<CRKey>, Vec<CRKey>, u64) {
    let (removed, kept): (Vec<CRKey>, Vec<CRKey>) = keys.into_iter().partition(|k| is_self_citation(k, self_author));
    let occurrences = removed.iter().map(|k| k.occurrences).sum();
    (kept, removed, occurrences)
}

/// Applies one dataset recipe to merged, precise keys.
pub fn build_dataset(keys: Vec<CRKey>, cfg: &PipelineConfig) -> Result<(Vec<CRKey>, FilterReport), FilterError> {
    if !cfg.min_share_per_rpy.is_unit_interval() {
        return Err(FilterError::InvalidShare(cfg.min_share_per_rpy));
    }
    if !cfg.remove_self_citations {
        let (kept, _, report) = apply_share_threshold(keys, cfg.min_share_per_rpy);
        return Ok((kept, report));
    }
    let author = cfg.self_author.as_ref().ok_or(FilterError::MissingSelfAuthor)?;
    let input_keys = keys.len();
    let full_totals = year_totals(&keys);
    let (rest, selfs, removed_self_occurrences) = filter_self_citations(keys, author);
    let self_below = selfs
        .iter()
        .filter(|k| below(k, &full_totals, cfg.min_share_per_rpy))
        .count();
    let totals = if cfg.recompute_shares_after_self_removal {
        year_totals(&rest)
    } else {
        full_totals
    };
    let (kept, _, mut report) = threshold_with_totals(rest, totals, cfg.min_share_per_rpy);
    report.input_keys = input_keys;
    report.removed_as_self = selfs.len();
    report.removed_self_occurrences = removed_self_occurrences;
    report.self_below_threshold = Some(self_below);
    Ok((kept, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::parse_cr_string;

    pub(crate) fn key(raw: &str, occurrences: u64) -> CRKey {
        CRKey {
            cluster_id: raw.into(),
            representative: parse_cr_string(raw).unwrap(),
            occurrences,
            variant_raws: vec![raw.into()],
            members: Vec::new(),
        }
    }

    fn garfield() -> AuthorName {
        normalize_author("GARFIELD E").unwrap()
    }

    #[test]
    fn anchor_shares() {
        let k = key("GARFIELD E, 1977, CURR CONTENTS, P5", 100);
        let totals = BTreeMap::from([(1977, 1010)]);
        let share = share_in_year(&k, &totals).unwrap();
        assert_eq!(share, Fraction::new(100, 1010));
        assert_eq!(share.percent(), "9.9%");
        let k = key("GARFIELD E, 1980, CURR CONTENTS, P5", 97);
        let share = share_in_year(&k, &BTreeMap::from([(1980, 1169)])).unwrap();
        assert_eq!(share.percent(), "8.3%");
        assert_eq!(
            share_in_year(&k, &BTreeMap::new()),
            Err(FilterError::MissingYearTotal(1980))
        );
    }

    #[test]
    fn sole_key_has_full_share() {
        let k = key("A, 1990, B", 7);
        assert_eq!(
            share_in_year(&k, &year_totals(std::slice::from_ref(&k))).unwrap(),
            Fraction::ONE
        );
    }

    #[test]
    fn threshold_is_strict() {
        let mut keys = vec![key("A, 1990, B", 10)];
        keys.push(key("C, 1990, D", 90));
        keys.push(key("E, 1991, F", 999));
        keys.push(key("G, 1991, H", 9001));
        let (kept, removed, report) = apply_share_threshold(keys, Fraction::new(1, 10));
        let names: Vec<_> = removed.iter().map(|k| k.representative.raw.as_str()).collect();
        assert_eq!(names, ["E, 1991, F"]);
        assert_eq!(kept.len(), 3);
        assert_eq!(report.input_keys, report.output_keys + report.removed_by_share);
    }

    #[test]
    fn zero_threshold_keeps_everything() {
        let keys = vec![key("A, 1990, B", 1), key("C, 1990, D", 1000)];
        let (kept, removed, _) = apply_share_threshold(keys, Fraction::ZERO);
        assert_eq!(kept.len(), 2);
        assert!(removed.is_empty());
    }

    #[test]
    fn self_citation_predicate() {
        let me = garfield();
        assert!(is_self_citation(&key("GARFIELD E, 1955, SCIENCE, V122, P108", 61), &me));
        assert!(is_self_citation(&key("GARFIELD EE, 1955, SCIENCE", 1), &me));
        assert!(is_self_citation(&key("GARFIELD, 1955, SCIENCE", 1), &me));
        assert!(!is_self_citation(&key("GARFIELD J, 1955, SCIENCE", 1), &me));
        assert!(!is_self_citation(&key("LOWRY OH, 1951, J BIOL CHEM", 29), &me));
        assert!(!is_self_citation(&key("1951, J BIOL CHEM", 29), &me));
        let (kept, removed, occ) = filter_self_citations(Vec::new(), &me);
        assert!(kept.is_empty() && removed.is_empty() && occ == 0);
    }

    #[test]
    fn recipe_two_needs_an_author() {
        let cfg = PipelineConfig {
            remove_self_citations: true,
            ..Default::default()
        };
        assert_eq!(
            build_dataset(Vec::new(), &cfg).unwrap_err(),
            FilterError::MissingSelfAuthor
        );
    }

    #[test]
    fn recipe_two_recomputes_denominators() {
        // the self key dominates 1990; without it the other key clears 10%
        let keys = vec![
            key("GARFIELD E, 1990, CURR CONTENTS, P1", 95),
            key("SMITH J, 1990, NATURE, V1, P2", 10),
            key("JONES K, 1990, CELL, V3, P4", 1),
        ];
        let (d1, r1) = build_dataset(keys.clone(), &PipelineConfig::dataset1()).unwrap();
        assert_eq!(d1.len(), 1);
        assert_eq!(r1.removed_by_share, 2);
        let (d2, r2) = build_dataset(keys.clone(), &PipelineConfig::dataset2(garfield())).unwrap();
        assert_eq!(d2.len(), 1);
        assert_eq!(d2[0].representative.raw, "SMITH J, 1990, NATURE, V1, P2");
        assert_eq!(r2.removed_as_self, 1);
        assert_eq!(r2.removed_self_occurrences, 95);
        assert_eq!(r2.self_below_threshold, Some(0));
        assert_eq!(r2.input_keys, r2.output_keys + r2.removed_by_share + r2.removed_as_self);
        let fixed = PipelineConfig {
            recompute_shares_after_self_removal: false,
            ..PipelineConfig::dataset2(garfield())
        };
        let (d2_fixed, _) = build_dataset(keys, &fixed).unwrap();
        assert!(d2_fixed.is_empty());
    }
}
