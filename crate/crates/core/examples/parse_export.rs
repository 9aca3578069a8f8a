//! Reads a tagged or tab-delimited export and prints what came out of it.
//!
//! ```text
//! cargo run --example parse_export -- fixtures/garfield_like.txt tagged
//! ```

use std::fs::File;

use rpys::corpus::{parse_export, CorpusStats, ExportFormat};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let path = args.next().unwrap_or_else(|| "fixtures/garfield_like.txt".into());
    let format: ExportFormat = args.next().as_deref().unwrap_or("tagged").parse()?;

    let parsed = parse_export(File::open(&path)?, format)?;
    let stats = CorpusStats::compute(&parsed.records);
    println!(
        "{path}: {} records, {} CR occurrences",
        stats.n_records, stats.n_cr_occurrences
    );
    println!("distinct CR strings: {}", stats.n_distinct_crs);
    if let Some((lo, hi)) = stats.year_span {
        println!("publication years: {lo}-{hi}");
    }
    for w in parsed.warnings.iter().take(10) {
        println!("warning: {w}");
    }

    if let Some(r) = parsed.records.first() {
        println!("\nfirst record {} ({}, {})", r.record_id, r.venue, r.pub_year);
        for a in &r.authors {
            println!("  author {a}");
        }
        for cr in r.cited_refs.iter().take(5) {
            println!("  cites {:?} -> rpy {:?}", cr.raw, cr.rpy);
        }
    }
    Ok(())
}
