//! NCR per reference publication year, its deviation from a centered
//! running median, and peak attribution.

use std::collections::{BTreeMap, HashSet};

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::dedup::CRKey;
use crate::fraction::decimal_serde;

pub const DEFAULT_WINDOW: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SpectrumError {
    #[error("window must be odd and at least 1, got {0}")]
    BadWindow(usize),
    #[error("series is not contiguous and ascending at year {0}")]
    NotContiguous(i32),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectrumPoint {
    pub year: i32,
    pub ncr: u64,
    #[serde(with = "decimal_serde")]
    pub median5: Rational64,
    /// `ncr - median5`, exactly.
    #[serde(with = "decimal_serde")]
    pub deviation: Rational64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Peak {
    /// Earliest year of the peak's plateau.
    pub year: i32,
    #[serde(with = "decimal_serde")]
    pub deviation: Rational64,
    /// Later years sharing the peak's deviation.
    pub plateau: Vec<i32>,
    /// Adjacent years with positive deviation that are not peaks themselves.
    pub shoulders: Vec<i32>,
    /// Keys of the peak year, most occurrences first.
    pub contributing_keys: Vec<CRKey>,
}

/// NCR per RPY, ascending, with missing years between the first and last
/// filled with zero. Empty input gives an empty series.
pub fn count_by_rpy(keys: &[CRKey]) -> Vec<(i32, u64)> {
    let mut counts: BTreeMap<i32, u64> = BTreeMap::new();
    for k in keys {
        *counts.entry(k.rpy()).or_insert(0) += k.occurrences;
    }
    let (Some(&lo), Some(&hi)) = (counts.keys().next(), counts.keys().next_back()) else {
        return Vec::new();
    };
    (lo..=hi).map(|y| (y, counts.get(&y).copied().unwrap_or(0))).collect()
}

/// Median of each year's centered window, truncated at the series ends.
/// An even count takes the mean of the two middle values.
pub fn median_deviation(series: &[(i32, u64)], window: usize) -> Result<Vec<SpectrumPoint>, SpectrumError> {
    if window == 0 || window.is_multiple_of(2) {
        return Err(SpectrumError::BadWindow(window));
    }
    for pair in series.windows(2) {
        if pair[1].0 != pair[0].0 + 1 {
            return Err(SpectrumError::NotContiguous(pair[1].0));
        }
    }
    let half = window / 2;
    let n = series.len();
    let mut buf = Vec::with_capacity(window);
    Ok(series
        .iter()
        .enumerate()
        .map(|(i, &(year, ncr))| {
            buf.clear();
            buf.extend(
                series[i.saturating_sub(half)..(i + half + 1).min(n)]
                    .iter()
                    .map(|p| p.1 as i64),
            );
            buf.sort_unstable();
            let m = buf.len();
            let median5 = if m % 2 == 1 {
                Rational64::from_integer(buf[m / 2])
            } else {
                Rational64::new(buf[m / 2 - 1] + buf[m / 2], 2)
            };
            SpectrumPoint {
                year,
                ncr,
                median5,
                deviation: Rational64::from_integer(ncr as i64) - median5,
            }
        })
        .collect())
}

/// Peaks of the deviation curve.
///
/// A maximal run of equal deviations is a peak when its value exceeds
/// `min_deviation` and is strictly above the deviation on each side of the
/// run (runs at either end of the series compare with their one neighbor).
/// The peak is reported at the run's earliest year.
pub fn detect_peaks(points: &[SpectrumPoint], min_deviation: Rational64) -> Vec<Peak> {
    let n = points.len();
    let mut runs: Vec<(usize, usize)> = Vec::new();
    let mut start = 0;
    for i in 1..=n {
        if i == n || points[i].deviation != points[start].deviation {
            runs.push((start, i - 1));
            start = i;
        }
    }

    let mut peak_runs = Vec::new();
    for (r, &(s, e)) in runs.iter().enumerate() {
        let v = points[s].deviation;
        let left = (r > 0).then(|| points[s - 1].deviation);
        let right = (e + 1 < n).then(|| points[e + 1].deviation);
        if v > min_deviation
            && (left.is_some() || right.is_some())
            && left.is_none_or(|l| l < v)
            && right.is_none_or(|x| x < v)
        {
            peak_runs.push((s, e));
        }
    }

    let in_peak: HashSet<usize> = peak_runs.iter().flat_map(|&(s, e)| s..=e).collect();
    let positive = |i: usize| points[i].deviation > Rational64::from_integer(0) && !in_peak.contains(&i);
    peak_runs
        .into_iter()
        .map(|(s, e)| {
            let mut shoulders = Vec::new();
            let mut i = s;
            while i > 0 && positive(i - 1) {
                i -= 1;
                shoulders.push(points[i].year);
            }
            let mut j = e;
            while j + 1 < n && positive(j + 1) {
                j += 1;
                shoulders.push(points[j].year);
            }
            shoulders.sort_unstable();
            Peak {
                year: points[s].year,
                deviation: points[s].deviation,
                plateau: points[s + 1..=e].iter().map(|p| p.year).collect(),
                shoulders,
                contributing_keys: Vec::new(),
            }
        })
        .collect()
}

/// Keys with the given RPY, most occurrences first, ties by raw string.
pub fn top_keys_for_year(keys: &[CRKey], year: i32, limit: Option<usize>, min_occurrences: Option<u64>) -> Vec<CRKey> {
    let mut out: Vec<CRKey> = keys
        .iter()
        .filter(|k| k.rpy() == year && k.occurrences >= min_occurrences.unwrap_or(0))
        .cloned()
        .collect();
    out.sort_by(|a, b| {
        b.occurrences
            .cmp(&a.occurrences)
            .then_with(|| a.representative.raw.cmp(&b.representative.raw))
    });
    if let Some(limit) = limit {
        out.truncate(limit);
    }
    out
}

/// Fills each peak's contributing keys.
pub fn attribute_peaks(peaks: &mut [Peak], keys: &[CRKey], limit: Option<usize>) {
    for p in peaks {
        p.contributing_keys = top_keys_for_year(keys, p.year, limit, None);
    }
}
