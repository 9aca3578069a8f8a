//! Text spectrogram of the synthetic corpus with its peaks.
//!
//! ```text
//! cargo run --example spectrogram -- 1950 2000
//! ```

use num_rational::Rational64;
use rpys::dedup::DedupConfig;
use rpys::filters::PipelineConfig;
use rpys::pipeline::{analyze, merge, Occurrences, SpectrumConfig};
use rpys::synthetic;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<i32>());
    let from = args.next().transpose()?.unwrap_or(1950);
    let to = args.next().transpose()?.unwrap_or(2000);

    let occ = Occurrences::from_records(&synthetic::garfield_like());
    let merged = merge(&occ, &occ.auto_accepted(&DedupConfig::default())?)?;
    let spec = SpectrumConfig {
        min_deviation: Rational64::from_integer(40),
        keys_per_peak: Some(2),
        ..Default::default()
    };
    let a = analyze(&merged.keys, &PipelineConfig::dataset1(), &spec)?;

    println!("{:>4} {:>4} {:>6}", "RPY", "NCR", "DEV");
    for p in a.points.iter().filter(|p| (from..=to).contains(&p.year)) {
        let bar = "#".repeat((p.ncr / 2) as usize);
        let mark = if a.peaks.iter().any(|k| k.year == p.year) {
            "  <- peak"
        } else {
            ""
        };
        println!("{:>4} {:>4} {:>6} {bar}{mark}", p.year, p.ncr, p.deviation.to_string());
    }
    for peak in &a.peaks {
        println!("\npeak {} (deviation {})", peak.year, peak.deviation);
        for k in &peak.contributing_keys {
            println!("  {:>3} {}", k.occurrences, k.representative.raw);
        }
    }
    Ok(())
}
