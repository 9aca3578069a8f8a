//! Oracles and generators shared by the integration tests.
#![allow(dead_code)]

use std::path::PathBuf;

use num_rational::Rational64;
use rand::Rng;
use rpys::corpus::{parse_cr_string, Record};
use rpys::spectroscopy::SpectrumPoint;

pub fn fixture_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/garfield_like.txt")
}

/// Median and deviation per year by sorting each truncated window.
pub fn median_oracle(ncr: &[u64], window: usize) -> Vec<(Rational64, Rational64)> {
    let half = window / 2;
    (0..ncr.len())
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half).min(ncr.len() - 1);
            let mut w: Vec<i64> = ncr[lo..=hi].iter().map(|&v| v as i64).collect();
            w.sort_unstable();
            let n = w.len();
            let median = if n % 2 == 1 {
                Rational64::from_integer(w[n / 2])
            } else {
                Rational64::new(w[n / 2 - 1] + w[n / 2], 2)
            };
            (median, Rational64::from_integer(ncr[i] as i64) - median)
        })
        .collect()
}

/// First years of deviation runs that beat every neighbouring run strictly,
/// after collapsing equal consecutive deviations into one run.
pub fn strict_run_maxima(points: &[SpectrumPoint]) -> Vec<i32> {
    let mut runs: Vec<(i32, Rational64)> = Vec::new();
    for p in points {
        if runs.last().is_none_or(|r| r.1 != p.deviation) {
            runs.push((p.year, p.deviation));
        }
    }
    (0..runs.len())
        .filter(|&i| {
            let left = i.checked_sub(1).map(|j| runs[j].1);
            let right = runs.get(i + 1).map(|r| r.1);
            (left.is_some() || right.is_some())
                && left.is_none_or(|l| runs[i].1 > l)
                && right.is_none_or(|r| runs[i].1 > r)
        })
        .map(|i| runs[i].0)
        .collect()
}

const AUTHORS: &[&str] = &["SMITH J", "SMITH JA", "SMYTH J", "JONES K", "GARFIELD E", "GARFIELD"];
const SOURCES: &[&str] = &[
    "NATURE",
    "NATURE LONDON",
    "SCIENCE",
    "CELL",
    "CURR CONTENTS",
    "CURR CONT",
];

/// A CR string from a small vocabulary, so that near-duplicates are common.
pub fn random_cr(rng: &mut impl Rng) -> String {
    if rng.random_ratio(1, 12) {
        return "ANON, UNDATED REPORT".to_string();
    }
    let mut s = format!(
        "{}, {}, {}",
        AUTHORS[rng.random_range(0..AUTHORS.len())],
        rng.random_range(1988..=1994),
        SOURCES[rng.random_range(0..SOURCES.len())]
    );
    if rng.random_bool(0.6) {
        s.push_str(&format!(", V{}", rng.random_range(1..=2)));
    }
    if rng.random_bool(0.7) {
        s.push_str(&format!(", P{}", rng.random_range(10..=11)));
    }
    s
}

pub fn random_corpus(rng: &mut impl Rng) -> Vec<Record> {
    let n = rng.random_range(1..=30);
    (0..n)
        .map(|i| Record {
            record_id: format!("R{i}"),
            authors: Vec::new(),
            pub_year: 2000,
            venue: "TEST".into(),
            cited_refs: (0..rng.random_range(0..=12))
                .map(|_| parse_cr_string(&random_cr(rng)).expect("generated CR parses"))
                .collect(),
            times_cited: None,
        })
        .collect()
}
