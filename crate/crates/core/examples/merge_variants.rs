//! Clusters spelling variants of the same reference and merges the accepted
//! clusters into keys.

use rpys::corpus::{parse_cr_string, CitedReference};
use rpys::dedup::{apply_merges, propose_clusters, similarity, DedupConfig, ProposalStatus};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let crs: Vec<CitedReference> = [
        "GARFIELD E, 1972, SCIENCE, V178, P471",
        "GARFIELD E, 1972, SCIENCE, V178, P471",
        "GARFIELD EU, 1972, SCIENCE, V178, P471",
        "GARFIELD E, 1972, SCIENCE, V178, P472",
        "GARFIELD E, 1972, SCIENCE, V178",
        "GARFIELD E, 1972, CURR CONTENTS, 1101, P5",
        "GARFIELD E, 1972, CURRENT CONTENTS, 1101, P5",
        "LOWRY OH, 1951, J BIOL CHEM, V193, P265",
        "LOWRY O, 1951, J BIOL CHEM, V193, P265",
    ]
    .iter()
    .map(|s| parse_cr_string(s))
    .collect::<Result<_, _>>()?;

    let a = &crs[5];
    let b = &crs[6];
    println!("similarity({:?}, {:?}) = {}", a.raw, b.raw, similarity(a, b));

    let cfg = DedupConfig::default();
    let mut proposals = propose_clusters(&crs, &cfg)?;
    for p in &proposals {
        println!(
            "\n{} ({:?}, weakest pair {})",
            p.cluster_id, p.evidence, p.similarity_score
        );
        for v in &p.variant_raws {
            println!("  {v}");
        }
    }

    // the page-less variant chains P471 and P472 into one cluster; a reviewer
    // rejects that cluster and accepts the rest
    for p in &mut proposals {
        p.status = if p.variant_raws.iter().any(|v| v.ends_with("P472")) {
            ProposalStatus::Rejected
        } else {
            ProposalStatus::Accepted
        };
    }
    println!();
    for k in apply_merges(&crs, &proposals)? {
        println!(
            "{:>2} x {} variants={}",
            k.occurrences,
            k.representative.raw,
            k.variant_raws.len()
        );
    }
    Ok(())
}
