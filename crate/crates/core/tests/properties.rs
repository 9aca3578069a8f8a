mod common;

use std::collections::BTreeSet;

use num_rational::{Ratio, Rational64};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;
use rpys::corpus::{normalize_author, parse_cr_string, CitedReference, Record};
use rpys::dedup::{apply_merges, similarity, CRKey, DedupConfig, ProposalStatus};
use rpys::filters::{apply_share_threshold, build_dataset, filter_self_citations, PipelineConfig};
use rpys::fraction::Fraction;
use rpys::pipeline::{merge, Occurrences};
use rpys::report::{journal_table, read_journals_csv, read_spectrum_csv, window_stats, write_csv, Table};
use rpys::spectroscopy::{detect_peaks, median_deviation};

/// Textbook edit-distance table, in chars.
fn levenshtein_dp(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut d = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for (i, row) in d.iter_mut().enumerate() {
        row[0] = i;
    }
    for (j, cell) in d[0].iter_mut().enumerate() {
        *cell = j;
    }
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            let sub = d[i - 1][j - 1] + usize::from(a[i - 1] != b[j - 1]);
            d[i][j] = sub.min(d[i - 1][j] + 1).min(d[i][j - 1] + 1);
        }
    }
    d[a.len()][b.len()]
}

fn similarity_oracle(a: &CitedReference, b: &CitedReference) -> Fraction {
    let text = |c: &CitedReference| {
        format!(
            "{}{}",
            c.first_author.clone().unwrap_or_default(),
            c.source.clone().unwrap_or_default()
        )
    };
    let (ta, tb) = (text(a), text(b));
    let longest = ta.chars().count().max(tb.chars().count());
    if longest == 0 {
        return Fraction::ONE;
    }
    Fraction::new((longest - levenshtein_dp(&ta, &tb)) as u64, longest as u64)
}

fn cr_string() -> impl Strategy<Value = String> {
    (
        "[A-Z]{2,9}( [A-Z]{1,3})?",
        1900i32..2020,
        "[A-Z]{2,8}( [A-Z]{2,8}){0,2}",
        proptest::option::of(1u32..400),
        proptest::option::of(1u32..2000),
    )
        .prop_map(|(a, y, s, v, p)| {
            let mut out = format!("{a}, {y}, {s}");
            if let Some(v) = v {
                out.push_str(&format!(", V{v}"));
            }
            if let Some(p) = p {
                out.push_str(&format!(", P{p}"));
            }
            out
        })
}

fn key(raw: &str, occurrences: u64) -> CRKey {
    CRKey {
        cluster_id: raw.into(),
        representative: parse_cr_string(raw).unwrap(),
        occurrences,
        variant_raws: vec![raw.into()],
        members: Vec::new(),
    }
}

/// First authors paired with whether they denote GARFIELD E.
const SELF_TABLE: &[(&str, bool)] = &[
    ("GARFIELD E", true),
    ("GARFIELD", true),
    ("GARFIELD EU", true),
    ("GARFIELD J", false),
    ("GARFIELDS E", false),
    ("SMITH J", false),
    ("LOWRY OH", false),
];

fn keyed_corpus() -> impl Strategy<Value = Vec<(usize, i32, u64)>> {
    prop::collection::vec((0..SELF_TABLE.len(), 1990i32..1995, 1u64..60), 1..40)
}

fn build_keys(spec: &[(usize, i32, u64)]) -> Vec<CRKey> {
    spec.iter()
        .enumerate()
        .map(|(i, &(a, y, n))| key(&format!("{}, {y}, SOURCE, P{i}", SELF_TABLE[a].0), n))
        .collect()
}

fn raws(keys: &[CRKey]) -> BTreeSet<String> {
    keys.iter().map(|k| k.representative.raw.clone()).collect()
}

fn series(values: &[u64]) -> Vec<(i32, u64)> {
    values.iter().enumerate().map(|(i, &v)| (1900 + i as i32, v)).collect()
}

proptest! {
    #[test]
    fn author_normalization_is_idempotent(raw in "[A-Za-z][A-Za-z' .,-]{0,24}") {
        if let Ok(name) = normalize_author(&raw) {
            prop_assert_eq!(normalize_author(&name.to_string()).unwrap(), name);
        }
    }

    #[test]
    fn cr_parsing_never_panics(raw in "\\PC{0,60}") {
        if let Ok(cr) = parse_cr_string(&raw) {
            prop_assert_eq!(&cr.raw, &raw);
        }
    }

    #[test]
    fn canonical_string_reparses_to_same_fields(raw in cr_string()) {
        let cr = parse_cr_string(&raw).unwrap();
        let again = parse_cr_string(&cr.canonical_string()).unwrap();
        prop_assert!(cr.same_fields(&again), "{:?} vs {:?}", cr, again);
        prop_assert_eq!(again.canonical_string(), cr.canonical_string());
    }

    #[test]
    fn similarity_matches_edit_distance_table(a in cr_string(), b in cr_string()) {
        let (a, b) = (parse_cr_string(&a).unwrap(), parse_cr_string(&b).unwrap());
        let s = similarity(&a, &b);
        prop_assert_eq!(s, similarity_oracle(&a, &b));
        prop_assert_eq!(s, similarity(&b, &a));
        prop_assert_eq!(similarity(&a, &a), Fraction::ONE);
    }

    #[test]
    fn merging_conserves_occurrences(seed in any::<u64>(), verdicts in prop::collection::vec(0u8..3, 0..40)) {
        let mut rng = StdRng::seed_from_u64(seed);
        let records = common::random_corpus(&mut rng);
        let occ = Occurrences::from_records(&records);
        let mut proposals = occ.propose(&DedupConfig::default()).unwrap();
        for (p, v) in proposals.iter_mut().zip(&verdicts) {
            p.status = [ProposalStatus::Proposed, ProposalStatus::Accepted, ProposalStatus::Rejected][*v as usize];
        }
        let merged = merge(&occ, &proposals).unwrap();
        prop_assert_eq!(merged.n_precise() + merged.n_imprecise + merged.n_repeat_dropped, merged.n_occurrences);
        prop_assert_eq!(merged.n_after_merge + merged.n_repeat_dropped, merged.n_occurrences);
        prop_assert!(merged.keys.len() <= merged.n_keys_unmerged);
    }

    #[test]
    fn rejected_proposals_change_nothing(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let occ = Occurrences::from_records(&common::random_corpus(&mut rng));
        let mut proposals = occ.propose(&DedupConfig::default()).unwrap();
        for p in &mut proposals {
            p.status = ProposalStatus::Rejected;
        }
        prop_assert_eq!(merge(&occ, &proposals).unwrap().keys, merge(&occ, &[]).unwrap().keys);
    }

    #[test]
    fn merging_twice_is_merging_once(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let occ = Occurrences::from_records(&common::random_corpus(&mut rng));
        let proposals = occ.auto_accepted(&DedupConfig::default()).unwrap();
        let once = merge(&occ, &proposals).unwrap();
        let twice = merge(&occ, &proposals).unwrap();
        prop_assert_eq!(&once.keys, &twice.keys);
        // each merged key keeps a distinct representative
        let reps: Vec<CitedReference> = once.keys.iter().map(|k| k.representative.clone()).collect();
        let again = apply_merges(&reps, &[]).unwrap();
        prop_assert_eq!(again.len(), once.keys.len());
    }

    #[test]
    fn median_deviation_matches_sorting_oracle(
        values in prop::collection::vec(0u64..500, 1..60),
        window in prop::sample::select(vec![1usize, 3, 5, 7, 9]),
    ) {
        let points = median_deviation(&series(&values), window).unwrap();
        let oracle = common::median_oracle(&values, window);
        for (p, (m, d)) in points.iter().zip(oracle) {
            prop_assert_eq!(p.median5, m);
            prop_assert_eq!(p.deviation, d);
        }
    }

    #[test]
    fn peaks_are_strict_run_maxima(values in prop::collection::vec(0u64..50, 1..60), min in -5i64..20) {
        let points = median_deviation(&series(&values), 5).unwrap();
        let min = Rational64::from_integer(min);
        let peaks: Vec<i32> = detect_peaks(&points, min).iter().map(|p| p.year).collect();
        let oracle: Vec<i32> = common::strict_run_maxima(&points)
            .into_iter()
            .filter(|y| points[(y - 1900) as usize].deviation > min)
            .collect();
        prop_assert_eq!(peaks, oracle);
    }

    #[test]
    fn higher_threshold_keeps_a_subset(spec in keyed_corpus(), lo in 0u64..=100, hi in 0u64..=100) {
        let (lo, hi) = (lo.min(hi), lo.max(hi));
        let keys = build_keys(&spec);
        let (kept_lo, removed_lo, r_lo) = apply_share_threshold(keys.clone(), Fraction::new(lo, 100));
        let (kept_hi, _, _) = apply_share_threshold(keys.clone(), Fraction::new(hi, 100));
        prop_assert!(raws(&kept_hi).is_subset(&raws(&kept_lo)));
        prop_assert_eq!(kept_lo.len() + removed_lo.len(), keys.len());
        prop_assert_eq!(r_lo.input_keys, r_lo.output_keys + r_lo.removed_by_share + r_lo.removed_as_self);
        if lo == 0 {
            prop_assert_eq!(kept_lo.len(), keys.len());
        }
    }

    #[test]
    fn self_filter_matches_author_table(spec in keyed_corpus()) {
        let keys = build_keys(&spec);
        let me = normalize_author("GARFIELD E").unwrap();
        let (kept, removed, occurrences) = filter_self_citations(keys, &me);
        let expected: BTreeSet<String> = build_keys(&spec)
            .into_iter()
            .zip(&spec)
            .filter(|(_, s)| SELF_TABLE[s.0].1)
            .map(|(k, _)| k.representative.raw)
            .collect();
        prop_assert_eq!(raws(&removed), expected);
        prop_assert_eq!(occurrences, removed.iter().map(|k| k.occurrences).sum::<u64>());
        prop_assert!(raws(&kept).is_disjoint(&raws(&removed)));
    }

    #[test]
    fn dropping_self_citations_only_promotes(spec in keyed_corpus()) {
        let me = normalize_author("GARFIELD E").unwrap();
        let (d1, _) = build_dataset(build_keys(&spec), &PipelineConfig::dataset1()).unwrap();
        let (d2, report) = build_dataset(build_keys(&spec), &PipelineConfig::dataset2(me.clone())).unwrap();
        let (d1_other, _, _) = filter_self_citations(d1, &me);
        prop_assert!(raws(&d1_other).is_subset(&raws(&d2)));
        prop_assert_eq!(report.input_keys, report.output_keys + report.removed_by_share + report.removed_as_self);
    }

    #[test]
    fn journal_shares_sum_to_at_most_one(venues in prop::collection::vec(0usize..8, 1..80), min in 1u64..6) {
        let records: Vec<Record> = venues
            .iter()
            .enumerate()
            .map(|(i, v)| Record {
                record_id: format!("R{i}"),
                authors: Vec::new(),
                pub_year: 1980 + (i % 20) as i32,
                venue: format!("VENUE {v}"),
                cited_refs: Vec::new(),
                times_cited: None,
            })
            .collect();
        let table = journal_table(&records, min).unwrap();
        let sum = table.rows.iter().fold(Ratio::<u64>::from_integer(0), |acc, r| {
            acc + Ratio::new(r.share.numer(), r.share.denom())
        });
        prop_assert!(sum <= Ratio::from_integer(1));
        prop_assert_eq!(sum, Ratio::new(table.cumulative_share.numer(), table.cumulative_share.denom()));
        if min == 1 {
            prop_assert_eq!(sum, Ratio::from_integer(1));
        }
        let back = read_journals_csv(&write_csv(Table::Journals(&table)).unwrap()[..]).unwrap();
        prop_assert_eq!(&back.rows, &table.rows);
        if !table.rows.is_empty() {
            prop_assert_eq!(back, table);
        }

        let y = 1980 + (venues.len() % 20) as i32;
        let w = window_stats(&records, y, y, None).unwrap();
        prop_assert_eq!(w.n_in_window, records.iter().filter(|r| r.pub_year == y).count() as u64);
    }

    #[test]
    fn spectrum_csv_reads_back(values in prop::collection::vec(0u64..10_000, 0..50)) {
        let points = median_deviation(&series(&values), 5).unwrap();
        let bytes = write_csv(Table::Spectrum(&points)).unwrap();
        prop_assert_eq!(read_spectrum_csv(&bytes[..]).unwrap(), points);
    }
}
