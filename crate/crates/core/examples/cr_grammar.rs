//! How cited-reference strings split into fields.

use rpys::corpus::parse_cr_string;

const SAMPLES: &[&str] = &[
    "LOWRY OH, 1951, J BIOL CHEM, V193, P265",
    "GARFIELD E, 1972, CURR CONTENTS, 1101, P5",
    "GARFIELD E, 1955, SCIENCE, V122, P108, DOI 10.1126/science.122.3159.108",
    "*NAT LIB MED, 1960, MED SUBJ HEAD",
    "[Anonymous], 1983, SCIENTIST, V1, P3",
    "GARFIELD E, CURRENT CONTENTS",
    "1957, US Patent, 2797850",
    "",
];

fn main() {
    for raw in SAMPLES {
        match parse_cr_string(raw) {
            Ok(cr) => {
                println!("{raw:?}");
                println!(
                    "  author={:?} rpy={:?} source={:?} volume={:?} page={:?} doi={:?}",
                    cr.first_author, cr.rpy, cr.source, cr.volume, cr.page, cr.doi
                );
                println!("  canonical: {}", cr.canonical_string());
            }
            Err(e) => println!("{raw:?}\n  rejected: {e}"),
        }
    }
}
