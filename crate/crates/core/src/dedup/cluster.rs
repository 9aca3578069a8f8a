use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use petgraph::unionfind::UnionFind;

use super::similarity::{length_bound, similarity_text, text_similarity};
use super::{CRKey, DedupConfig, DedupError, Evidence, MergeProposal, ProposalStatus, VolumePageRule};
use crate::corpus::CitedReference;
use crate::fraction::Fraction;

struct Variant<'a> {
    cr: &'a CitedReference,
    text: String,
    len: usize,
    occurrences: Vec<usize>,
}

/// Scores one pair of distinct variants. `None` when the pair must not merge.
fn score_pair(a: &Variant, b: &Variant, cfg: &DedupConfig) -> Option<(Fraction, Evidence)> {
    let (x, y) = (a.cr, b.cr);
    let vp_match = match cfg.volume_page_rule {
        VolumePageRule::Ignore => false,
        VolumePageRule::RequireEqualWhenBothPresent => {
            let clash = |p: &Option<String>, q: &Option<String>| matches!((p, q), (Some(p), Some(q)) if p != q);
            if clash(&x.volume, &y.volume) || clash(&x.page, &y.page) {
                return None;
            }
            x.volume.is_some() && x.page.is_some() && x.volume == y.volume && x.page == y.page
        }
    };
    let bar = if vp_match {
        cfg.similarity_floor_with_vp_match
    } else {
        cfg.similarity_threshold
    };
    if length_bound(a.len, b.len) < bar {
        return None;
    }
    let sim = text_similarity(&a.text, &b.text);
    if sim < bar {
        return None;
    }
    let evidence = match (vp_match, cfg.similarity_floor_with_vp_match.is_zero()) {
        (false, _) => Evidence::StringSimilarity,
        (true, true) => Evidence::VolumePageMatch,
        (true, false) => Evidence::Both,
    };
    Some((sim, evidence))
}

/// Proposes clusters of variant strings among references that all carry an
/// RPY. Identical raw strings are one variant; only clusters of two or more
/// distinct variants are proposed. Output order and ids depend only on the
/// set of raw strings, not on input order.
pub fn propose_clusters<T: AsRef<CitedReference>>(
    crs: &[T],
    cfg: &DedupConfig,
) -> Result<Vec<MergeProposal>, DedupError> {
    cfg.validate()?;
    let mut by_year: BTreeMap<i32, BTreeMap<&str, Variant>> = BTreeMap::new();
    for (i, c) in crs.iter().enumerate() {
        let cr = c.as_ref();
        let rpy = cr.rpy.ok_or(DedupError::ImpreciseInput(i))?;
        by_year
            .entry(rpy)
            .or_default()
            .entry(cr.raw.as_str())
            .or_insert_with(|| {
                let text = similarity_text(cr);
                Variant {
                    cr,
                    len: text.chars().count(),
                    text,
                    occurrences: Vec::new(),
                }
            })
            .occurrences
            .push(i);
    }

    let mut proposals = Vec::new();
    for (rpy, variants) in by_year {
        let variants: Vec<Variant> = variants.into_values().collect();
        let n = variants.len();
        let mut uf = UnionFind::<usize>::new(n);
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if let Some((sim, ev)) = score_pair(&variants[i], &variants[j], cfg) {
                    uf.union(i, j);
                    edges.push((i, sim, ev));
                }
            }
        }
        if edges.is_empty() {
            continue;
        }
        let labels = uf.into_labeling();
        // components keyed by root, listed in order of their smallest raw
        let mut components: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, root) in labels.iter().enumerate() {
            components.entry(*root).or_default().push(i);
        }
        let mut comps: Vec<Vec<usize>> = components.into_values().filter(|c| c.len() > 1).collect();
        comps.sort_by_key(|c| c[0]);

        let mut comp_of = vec![usize::MAX; n];
        for (k, comp) in comps.iter().enumerate() {
            for &i in comp {
                comp_of[i] = k;
            }
        }
        let mut score: Vec<Option<(Fraction, Evidence)>> = vec![None; comps.len()];
        for (i, sim, ev) in edges {
            let slot = &mut score[comp_of[i]];
            *slot = Some(match *slot {
                None => (sim, ev),
                Some((s, e)) => (s.min(sim), e.combine(ev)),
            });
        }

        for (k, comp) in comps.iter().enumerate() {
            let (similarity_score, evidence) = score[k].expect("every component has an edge");
            let mut members: Vec<usize> = comp
                .iter()
                .flat_map(|&i| variants[i].occurrences.iter().copied())
                .collect();
            members.sort_unstable();
            proposals.push(MergeProposal {
                cluster_id: format!("{rpy}-{}", k + 1),
                rpy,
                member_occurrence_ids: members,
                variant_raws: comp.iter().map(|&i| variants[i].cr.raw.clone()).collect(),
                similarity_score,
                evidence,
                status: ProposalStatus::Proposed,
            });
        }
    }
    Ok(proposals)
}

/// Records a verdict. Returns whether the status changed.
pub fn set_status(
    proposals: &mut [MergeProposal],
    cluster_id: &str,
    status: ProposalStatus,
) -> Result<bool, DedupError> {
    let p = proposals
        .iter_mut()
        .find(|p| p.cluster_id == cluster_id)
        .ok_or_else(|| DedupError::UnknownProposal(cluster_id.to_string()))?;
    let changed = p.status != status;
    p.status = status;
    Ok(changed)
}

/// Merges occurrences into keys. Identical raw strings always share a key;
/// accepted proposals join their members. Proposed and rejected proposals
/// merge nothing. The sum of key occurrences equals `crs.len()`.
///
/// Keys are ordered by RPY, then representative raw.
pub fn apply_merges<T: AsRef<CitedReference>>(
    crs: &[T],
    proposals: &[MergeProposal],
) -> Result<Vec<CRKey>, DedupError> {
    let n = crs.len();
    let mut uf = UnionFind::<usize>::new(n);
    let mut first_of_raw: HashMap<&str, usize> = HashMap::new();
    for (i, c) in crs.iter().enumerate() {
        let cr = c.as_ref();
        if cr.rpy.is_none() {
            return Err(DedupError::ImpreciseInput(i));
        }
        let first = *first_of_raw.entry(cr.raw.as_str()).or_insert(i);
        uf.union(first, i);
    }

    let mut proposal_of: HashMap<usize, &str> = HashMap::new();
    for p in proposals.iter().filter(|p| p.status == ProposalStatus::Accepted) {
        if let Some(&bad) = p.member_occurrence_ids.iter().find(|&&m| m >= n) {
            return Err(DedupError::DanglingProposal {
                cluster_id: p.cluster_id.clone(),
                occurrence: bad,
            });
        }
        if let Some((&head, rest)) = p.member_occurrence_ids.split_first() {
            for &m in rest {
                uf.union(head, m);
            }
            proposal_of.entry(head).or_insert(&p.cluster_id);
        }
    }

    let labels = uf.into_labeling();
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, root) in labels.iter().enumerate() {
        groups.entry(*root).or_default().push(i);
    }

    let mut keys: Vec<CRKey> = groups
        .into_values()
        .map(|members| {
            let mut counts: BTreeMap<&str, (u64, usize)> = BTreeMap::new();
            for &m in &members {
                let e = counts.entry(crs[m].as_ref().raw.as_str()).or_insert((0, m));
                e.0 += 1;
            }
            // most frequent raw; BTreeMap order makes ties resolve to the smallest
            let (_, &(_, rep_at)) = counts
                .iter()
                .max_by(|a, b| a.1 .0.cmp(&b.1 .0).then_with(|| b.0.cmp(a.0)))
                .expect("groups are non-empty");
            let cluster_id = members
                .iter()
                .filter_map(|m| proposal_of.get(m))
                .min()
                .map(|s| s.to_string())
                .unwrap_or_else(|| format!("s{}", members[0]));
            CRKey {
                cluster_id,
                representative: crs[rep_at].as_ref().clone(),
                occurrences: members.len() as u64,
                variant_raws: counts.keys().map(|s| s.to_string()).collect(),
                members,
            }
        })
        .collect();
    keys.sort_by(|a, b| {
        a.rpy()
            .cmp(&b.rpy())
            .then_with(|| a.representative.raw.cmp(&b.representative.raw))
    });
    Ok(keys)
}

/// Counts each key at most once per citing record. `record_of[i]` is the
/// record holding occurrence `i`. Returns the collapsed keys and the number
/// of occurrences removed.
pub fn drop_repeat_citations(keys: Vec<CRKey>, record_of: &[usize]) -> (Vec<CRKey>, u64) {
    let mut removed = 0;
    let keys = keys
        .into_iter()
        .map(|mut key| {
            let mut seen = HashSet::new();
            key.members.retain(|m| seen.insert(record_of[*m]));
            removed += key.occurrences - key.members.len() as u64;
            key.occurrences = key.members.len() as u64;
            key
        })
        .collect();
    (keys, removed)
}

/// Distinct raw strings across the keys.
pub fn distinct_raws(keys: &[CRKey]) -> usize {
    keys.iter()
        .flat_map(|k| k.variant_raws.iter())
        .collect::<BTreeSet<_>>()
        .len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::parse_cr_string;

    fn crs(raws: &[&str]) -> Vec<CitedReference> {
        raws.iter().map(|s| parse_cr_string(s).unwrap()).collect()
    }

    #[test]
    fn science_variants_cluster_with_both_evidence() {
        let input = crs(&[
            "GARFIELD E, 1955, SCIENCE, V122, P108",
            "GARFIELD E, 1955, SCIENCE NEW YORK, V122, P108",
        ]);
        let props = propose_clusters(&input, &DedupConfig::default()).unwrap();
        assert_eq!(props.len(), 1);
        assert_eq!(props[0].evidence, Evidence::Both);
        assert_eq!(props[0].member_occurrence_ids, vec![0, 1]);
        // 9 extra chars over 26
        assert_eq!(props[0].similarity_score, Fraction::new(17, 26));
    }

    #[test]
    fn contradicting_volume_blocks() {
        let input = crs(&[
            "GARFIELD E, 1955, SCIENCE, V122, P108",
            "GARFIELD E, 1955, SCIENCE NEW YORK, V123, P108",
        ]);
        assert!(propose_clusters(&input, &DedupConfig::default()).unwrap().is_empty());
    }

    #[test]
    fn different_years_never_cluster() {
        let input = crs(&[
            "GARFIELD E, 1955, SCIENCE, V122, P108",
            "GARFIELD E, 1956, SCIENCE, V122, P108",
        ]);
        assert!(propose_clusters(&input, &DedupConfig::default()).unwrap().is_empty());
    }

    #[test]
    fn imprecise_input_is_rejected() {
        let input = crs(&["GARFIELD E, SCIENCE"]);
        assert!(matches!(
            propose_clusters(&input, &DedupConfig::default()),
            Err(DedupError::ImpreciseInput(0))
        ));
        assert!(matches!(apply_merges(&input, &[]), Err(DedupError::ImpreciseInput(0))));
    }

    #[test]
    fn string_only_clusters_need_the_threshold() {
        let input = crs(&[
            "GARFIELD E, 1971, CURR CONTENTS, P5",
            "GARFIELD E, 1971, CURRENT CONTENTS, P5",
            "GARFIELD E, 1971, ESSAYS INFORMATION S, P5",
        ]);
        let props = propose_clusters(&input, &DedupConfig::default()).unwrap();
        assert_eq!(props.len(), 1);
        assert_eq!(props[0].evidence, Evidence::StringSimilarity);
        assert_eq!(props[0].variant_raws.len(), 2);
        assert_eq!(props[0].cluster_id, "1971-1");
    }

    #[test]
    fn proposals_ignore_input_order() {
        let mut raws = vec![
            "GARFIELD E, 1971, CURR CONTENTS, P5",
            "GARFIELD E, 1971, CURRENT CONTENTS, P5",
            "LOWRY OH, 1951, J BIOL CHEM, V193, P265",
            "LOWRY O, 1951, J BIOL CHEM, V193, P265",
        ];
        let a = propose_clusters(&crs(&raws), &DedupConfig::default()).unwrap();
        raws.reverse();
        let b = propose_clusters(&crs(&raws), &DedupConfig::default()).unwrap();
        let strip = |ps: Vec<MergeProposal>| {
            ps.into_iter()
                .map(|p| (p.cluster_id, p.variant_raws))
                .collect::<Vec<_>>()
        };
        assert_eq!(strip(a), strip(b));
    }

    #[test]
    fn accepted_merge_picks_most_frequent_variant() {
        let input = crs(&[
            "LOWRY O, 1951, J BIOL CHEM, V193, P265",
            "LOWRY OH, 1951, J BIOL CHEM, V193, P265",
            "LOWRY OH, 1951, J BIOL CHEM, V193, P265",
        ]);
        let mut props = propose_clusters(&input, &DedupConfig::default()).unwrap();
        let keys = apply_merges(&input, &props).unwrap();
        assert_eq!(keys.len(), 2);
        super::super::auto_accept(&mut props);
        let keys = apply_merges(&input, &props).unwrap();
        assert_eq!(keys.len(), 1);
        assert_eq!(keys[0].occurrences, 3);
        assert_eq!(keys[0].representative.raw, "LOWRY OH, 1951, J BIOL CHEM, V193, P265");
        assert_eq!(keys[0].cluster_id, "1951-1");
    }

    #[test]
    fn ties_go_to_the_smaller_raw() {
        let input = crs(&["B X, 1990, SRC, V1, P1", "A X, 1990, SRC, V1, P1"]);
        let mut props = propose_clusters(&input, &DedupConfig::default()).unwrap();
        super::super::auto_accept(&mut props);
        let keys = apply_merges(&input, &props).unwrap();
        assert_eq!(keys[0].representative.raw, "A X, 1990, SRC, V1, P1");
    }

    #[test]
    fn identical_raws_form_one_key() {
        let input = crs(&["A, 1990, B"; 5]);
        let keys = apply_merges(&input, &[]).unwrap();
        assert_eq!(keys.len(), 1);
        assert_eq!(keys[0].occurrences, 5);
        assert_eq!(keys[0].cluster_id, "s0");
    }

    #[test]
    fn dangling_members_are_rejected() {
        let input = crs(&["A, 1990, B"]);
        let p = MergeProposal {
            cluster_id: "x".into(),
            rpy: 1990,
            member_occurrence_ids: vec![0, 7],
            variant_raws: vec![],
            similarity_score: Fraction::ONE,
            evidence: Evidence::Both,
            status: ProposalStatus::Accepted,
        };
        assert!(matches!(
            apply_merges(&input, &[p]),
            Err(DedupError::DanglingProposal { occurrence: 7, .. })
        ));
    }

    #[test]
    fn repeat_citations_collapse_per_record() {
        let input = crs(&["A, 1990, B", "A, 1990, B", "A, 1990, B"]);
        let keys = apply_merges(&input, &[]).unwrap();
        let (keys, removed) = drop_repeat_citations(keys, &[0, 0, 1]);
        assert_eq!(removed, 1);
        assert_eq!(keys[0].occurrences, 2);
    }

    #[test]
    fn verdicts_report_changes() {
        let input = crs(&["A B, 1990, SRC, V1, P1", "A C, 1990, SRC, V1, P1"]);
        let mut props = propose_clusters(&input, &DedupConfig::default()).unwrap();
        assert!(set_status(&mut props, "1990-1", ProposalStatus::Accepted).unwrap());
        assert!(!set_status(&mut props, "1990-1", ProposalStatus::Accepted).unwrap());
        assert!(matches!(
            set_status(&mut props, "nope", ProposalStatus::Rejected),
            Err(DedupError::UnknownProposal(_))
        ));
    }
}
