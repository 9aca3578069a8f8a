//! Dataset 1 (share threshold) against dataset 2 (self-citations removed
//! first) on the synthetic corpus.

use rpys::corpus::normalize_author;
use rpys::dedup::DedupConfig;
use rpys::filters::{build_dataset, PipelineConfig};
use rpys::pipeline::{merge, Occurrences};
use rpys::synthetic;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let records = synthetic::garfield_like();
    let occ = Occurrences::from_records(&records);
    let merged = merge(&occ, &occ.auto_accepted(&DedupConfig::default())?)?;
    println!(
        "{} occurrences, {} without a year, {} keys after merging ({} before)",
        merged.n_occurrences,
        merged.n_imprecise,
        merged.keys.len(),
        merged.n_keys_unmerged
    );

    let me = normalize_author(synthetic::SELF_AUTHOR)?;
    let recipes = [
        ("dataset 1", PipelineConfig::dataset1()),
        ("dataset 2", PipelineConfig::dataset2(me.clone())),
        (
            "dataset 2, shares against all keys",
            PipelineConfig {
                recompute_shares_after_self_removal: false,
                ..PipelineConfig::dataset2(me)
            },
        ),
    ];
    for (name, cfg) in recipes {
        let (kept, r) = build_dataset(merged.keys.clone(), &cfg)?;
        println!(
            "{name}: {} in, {} below {} share, {} self-cited, {} kept",
            r.input_keys,
            r.removed_by_share,
            r.min_share,
            r.removed_as_self,
            kept.len()
        );
        if let Some(n) = r.self_below_threshold {
            println!("  {n} of the self-cited keys were under the threshold anyway");
        }
    }
    Ok(())
}
