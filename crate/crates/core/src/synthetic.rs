//! A deterministic, Garfield-shaped corpus for demos and regression tests.
//!
//! 1558 records by one self author over 1954-2016, citing 15890 CR
//! occurrences. The reference lists hold a handful of strongly cited works,
//! spelling variants of some of them, hundreds of small self-citations and
//! a thin tail of older literature. No randomness is involved: the same call
//! always returns the same records in the same order.

use std::collections::{BTreeMap, HashSet};

use crate::corpus::{normalize_author, parse_cr_string, write_export, ExportFormat, Record};

pub const SELF_AUTHOR: &str = "GARFIELD E";

const TOTAL_OCCURRENCES: u32 = 15890;
const N_SMALL_SELF: u32 = 1269;
const MINORS_PER_HEAVY_YEAR: u32 = 12;

/// Venues with their in-window paper count and the publication years of
/// the papers outside 1970-1990.
struct VenueSpec {
    name: &'static str,
    in_window: (u32, i32, i32),
    outside: &'static [i32],
    has_refs: bool,
}

const CC_OUTSIDE: &[i32] = &[
    1962, 1962, 1962, 1962, 1962, 1962, 1962, 1962, 1963, 1963, 1963, 1963, 1963, 1963, 1963, 1963, 1963, 1964, 1964,
    1964, 1964, 1964, 1964, 1964, 1964, 1964, 1965, 1965, 1965, 1965, 1965, 1965, 1965, 1965, 1965, 1966, 1966, 1966,
    1966, 1966, 1966, 1966, 1966, 1966, 1967, 1967, 1967, 1967, 1967, 1967, 1967, 1967, 1967, 1968, 1968, 1968, 1968,
    1968, 1968, 1968, 1968, 1968, 1969, 1969, 1969, 1969, 1969, 1969, 1969, 1969, 1991, 1991, 1991, 1991, 1991, 1992,
    1992, 1992, 1992, 1993, 1993, 1993, 1993,
];

const VENUES: &[VenueSpec] = &[
    VenueSpec {
        name: "CURRENT CONTENTS",
        in_window: (980, 1970, 1990),
        outside: CC_OUTSIDE,
        has_refs: true,
    },
    VenueSpec {
        name: "SCIENTIST",
        in_window: (25, 1986, 1990),
        outside: &[],
        has_refs: false,
    },
    VenueSpec {
        name: "CURRENT CONTENTS LIFE SCIENCES",
        in_window: (70, 1970, 1990),
        outside: &[
            1961, 1961, 1962, 1962, 1963, 1963, 1964, 1964, 1965, 1965, 1966, 1966, 1967, 1967, 1968, 1968, 1969, 1969,
        ],
        has_refs: true,
    },
    VenueSpec {
        name: "JOURNAL OF INFORMATION SCIENCE",
        in_window: (8, 1979, 1990),
        outside: &[1991, 1992, 1996, 1999, 2003],
        has_refs: true,
    },
    VenueSpec {
        name: "SCIENTOMETRICS",
        in_window: (7, 1979, 1990),
        outside: &[1991, 1995, 2000, 2009, 2016],
        has_refs: true,
    },
    VenueSpec {
        name: "NATURE",
        in_window: (6, 1970, 1990),
        outside: &[1955, 1958, 1961, 1964, 1967, 1969],
        has_refs: true,
    },
    VenueSpec {
        name: "JOURNAL OF CHEMICAL DOCUMENTATION",
        in_window: (0, 1970, 1990),
        outside: &[1961, 1961, 1962, 1963, 1964, 1965, 1965, 1966, 1967, 1968, 1969, 1969],
        has_refs: true,
    },
    VenueSpec {
        name: "JOURNAL OF THE AMERICAN SOCIETY FOR INFORMATION SCIENCE",
        in_window: (6, 1970, 1990),
        outside: &[1991, 1994, 1998, 2001, 2005],
        has_refs: true,
    },
    VenueSpec {
        name: "ABSTRACTS OF PAPERS OF THE AMERICAN CHEMICAL SOCIETY",
        in_window: (5, 1970, 1990),
        outside: &[1960, 1962, 1964, 1966, 1968, 1969],
        has_refs: true,
    },
    VenueSpec {
        name: "SCIENCE",
        in_window: (4, 1970, 1990),
        outside: &[1954, 1955, 1956, 1962, 1963, 1966],
        has_refs: true,
    },
];

/// The later Scientist papers, 1991-2000, without reference lists.
const SCIENTIST_LATE: u32 = 123;

const OTHER_OUTSIDE: &[i32] = &[
    1957, 1958, 1959, 1960, 1961, 1964, 1967, 1969, 1991, 1992, 1993, 1994, 1995, 1996, 1997, 1998, 1999, 2000, 2001,
    2002, 2003, 2004, 2005, 2006, 2008, 2010, 2012, 2014, 2016,
];

const PREFIXES: &[&str] = &[
    "JOURNAL OF",
    "ANNALS OF",
    "BULLETIN OF",
    "PROCEEDINGS OF",
    "REVIEW OF",
    "ARCHIVES OF",
    "INTERNATIONAL JOURNAL OF",
    "QUARTERLY JOURNAL OF",
    "TRANSACTIONS ON",
    "ADVANCES IN",
];

const SUBJECTS: &[&str] = &[
    "LIBRARIANSHIP",
    "DOCUMENTATION",
    "CHEMICAL INFORMATION",
    "MEDICAL LIBRARIES",
    "SCIENCE POLICY",
    "HISTORY OF SCIENCE",
    "INFORMATION MANAGEMENT",
    "SOCIAL STUDIES OF SCIENCE",
    "RESEARCH EVALUATION",
    "SCIENTIFIC COMMUNICATION",
    "LINGUISTICS",
    "PHARMACOLOGY",
];

const COAUTHORS: &[&str] = &["SHER IH", "SMALL H", "PUDOVKIN AI", "ISTOMIN VS", "WELLJAMSDOROF A"];

const SURNAMES: &[&str] = &[
    "PRICE",
    "MERTON",
    "KESSLER",
    "ZIPF",
    "LOTKA",
    "MARTYN",
    "SALTON",
    "CLEVERDON",
    "TAUBE",
    "LUHN",
    "KENT",
    "VICKERY",
    "BROOKES",
    "NARIN",
    "MORAVCSIK",
    "COLE",
    "ZUCKERMAN",
    "HAGSTROM",
    "CRANE",
    "KUHN",
    "BERNAL",
    "POLANYI",
    "ZIMAN",
    "MENZEL",
    "HERNER",
    "TUKEY",
    "BOURNE",
    "LANCASTER",
    "SWANSON",
    "MARON",
    "KOCHEN",
    "ACKOFF",
    "LINE",
    "URQUHART",
    "BRILL",
    "CAWKELL",
    "GRIFFITH",
    "MULLINS",
    "CRONIN",
    "WHITE",
    "MCCAIN",
    "NEDERHOF",
    "IRVINE",
    "MARTIN",
    "VINKLER",
    "BRAUN",
    "SCHUBERT",
    "GLANZEL",
    "EGGHE",
    "ROUSSEAU",
];

const INITIALS: &[&str] = &["DJ", "RK", "MM", "GK", "AJ", "J", "G", "CW", "M", "HP", "A", "BC"];

const SOURCES: &[&str] = &[
    "AM DOC",
    "J DOC",
    "SCIENCE",
    "NATURE",
    "J CHEM DOC",
    "ASLIB PROC",
    "LIBR QUART",
    "P IRE",
    "IBM J RES DEV",
    "AM SOCIOL REV",
    "SOC STUD SCI",
    "RES POLICY",
    "J AM SOC INFORM SCI",
    "INFORM STORAGE RET",
    "B MED LIBR ASSOC",
    "PHYS REV",
    "J AM CHEM SOC",
    "MINERVA",
    "SCI AM",
    "COLL RES LIBR",
    "SPEC LIBR",
    "REV MOD PHYS",
    "LIBR TRENDS",
    "INFORM PROCESS MANAG",
    "J INFORM SCI",
    "SCIENTOMETRICS",
    "R D MANAGE",
    "AM PSYCHOL",
    "HIST SCI",
    "ISIS",
];

/// Pages that appear in hand-written keys and must not be reused by
/// generated ones in any year.
const RESERVED_PAGES: &[u32] = &[3, 5, 85, 101, 108, 117, 137, 265, 385, 471, 479, 583, 737, 1113];

/// Five-year Current Contents forms of a self key that keep its year,
/// volume and page.
const CC_VARIANT_SOURCES: &[&str] = &["CURRENT CONTENTS", "CURR CONTENT", "CURR CONT"];

/// Hand-written keys: raw string, occurrences, and spelling variants cited
/// once each alongside the canonical form.
fn named_keys() -> Vec<(String, u32, Vec<String>)> {
    let mut keys = Vec::new();
    let science = |year: i32, v: u32, p: u32, occ: u32| {
        (
            format!("GARFIELD E, {year}, SCIENCE, V{v}, P{p}"),
            occ,
            vec![format!("GARFIELD E, {year}, SCIENCE NEW YORK, V{v}, P{p}")],
        )
    };
    keys.push(science(1955, 122, 108, 61));
    keys.push(science(1972, 178, 471, 64));
    for (year, tail, occ) in [
        (1971, "P5", 54),
        (1972, "1101, P5", 57),
        (1973, "P5", 73),
        (1974, "P5", 61),
        (1975, "P5", 79),
        (1978, "P5", 88),
        (1985, "V43, P3", 75),
        (1987, "P3", 62),
        (1988, "P3", 54),
    ] {
        let mut variants: Vec<String> = CC_VARIANT_SOURCES
            .iter()
            .map(|s| format!("GARFIELD E, {year}, {s}, {tail}"))
            .collect();
        variants.push(format!("GARFIELD, {year}, CURR CONTENTS, {tail}"));
        keys.push((format!("GARFIELD E, {year}, CURR CONTENTS, {tail}"), occ, variants));
    }
    keys.push(("GARFIELD E, 1977, CURR CONTENTS, P5".into(), 100, Vec::new()));
    keys.push(("GARFIELD E, 1980, CURR CONTENTS, P5".into(), 97, Vec::new()));
    keys.push(("GARFIELD E, 1957, J PATENT OFFICE SOC, V39, P583".into(), 4, Vec::new()));

    let plain = |raw: &str, occ: u32| (raw.to_string(), occ, Vec::new());
    keys.push((
        "LOWRY OH, 1951, J BIOL CHEM, V193, P265".into(),
        29,
        vec!["LOWRY O, 1951, J BIOL CHEM, V193, P265".into()],
    ));
    keys.push((
        "WATSON JD, 1953, NATURE, V171, P737".into(),
        18,
        vec!["WATSON J, 1953, NATURE, V171, P737".into()],
    ));
    keys.push(plain("BRADFORD SC, 1950, DOCUMENTATION", 10));
    keys.push(plain("BUSH V, 1945, ATLANTIC MONTHLY, V176, P101", 12));
    keys.push(plain("AVERY OT, 1944, J EXP MED, V79, P137", 10));
    keys.push(plain("BRODMAN E, 1944, B MED LIBR ASSOC, V32, P479", 6));
    keys.push(plain("SELYE H, 1946, J CLIN ENDOCRINOL, V6, P117", 5));
    keys.push(plain("WELLS HG, 1938, WORLD BRAIN", 9));
    keys.push(plain("BRADFORD S, 1934, ENGINEERING-LONDON, V137, P85", 6));
    keys.push(plain("GROSS PLK, 1927, SCIENCE, V66, P385", 8));
    keys.push(plain(
        "PUDOVKIN AI, 2002, J AM SOC INF SCI TEC, V53, P1113, DOI 10.1002/asi.10153",
        5,
    ));
    keys
}

/// Filler keys cited next to the hand-written ones in sparse years.
const NAMED_YEAR_FILLERS: &[(i32, &[u32])] = &[
    (1927, &[1]),
    (1934, &[1, 1]),
    (1938, &[1]),
    (1944, &[2]),
    (1945, &[2, 2]),
    (1946, &[1, 1]),
    (1950, &[2, 2]),
    (1951, &[4, 4]),
    (1953, &[3, 3]),
    (1957, &[3, 2, 2]),
    (2002, &[1, 1]),
];

const SPARSE_PATTERNS: &[&[u32]] = &[
    &[3, 2, 1, 1],
    &[2, 2, 1, 1],
    &[1, 1, 1, 1],
    &[4, 3, 2, 1],
    &[2, 1, 1, 1],
    &[4, 2, 2, 1],
];

const IMPRECISE: &[(&str, u32)] = &[
    ("GARFIELD E, CURR CONTENTS", 60),
    ("GARFIELD E, ESSAYS INFORMATION S", 41),
    ("GARFIELD E, UNPUB", 25),
    ("GARFIELD E, SCI CIT INDEX", 20),
    ("GARFIELD E, PERSONAL COMMUNICATION", 16),
    ("[ANONYMOUS], J CHEM DOC", 12),
    ("PRICE DJD, LITTLE SCI BIG SCI", 10),
    ("BERNAL JD, SOCIAL FUNCTION SCI", 9),
    ("WELLS HG, WORLD BRAIN 1938 ED", 6),
];

/// Occurrence totals of the heavily cited years, before variants are added.
const HEAVY_TOTALS: &[(i32, u32)] = &[
    (1955, 400),
    (1971, 500),
    (1972, 560),
    (1973, 700),
    (1974, 600),
    (1975, 750),
    (1977, 1010),
    (1978, 850),
    (1980, 1169),
    (1985, 700),
    (1987, 600),
    (1988, 500),
];

fn heavy_years() -> Vec<i32> {
    std::iter::once(1955).chain(1961..=1990).collect()
}

fn sparse_years() -> Vec<i32> {
    let named: HashSet<i32> = NAMED_YEAR_FILLERS.iter().map(|&(y, _)| y).collect();
    let mut years = vec![1665, 1859];
    years.extend((1900..=1953).filter(|y| !named.contains(y)));
    years.extend([1954, 1956, 1958, 1959, 1960]);
    years.extend((1991..=2010).filter(|y| !named.contains(y)));
    years
}

#[derive(Default)]
struct PageAllocator {
    next: BTreeMap<i32, u32>,
}

impl PageAllocator {
    fn page(&mut self, year: i32) -> u32 {
        let k = self.next.entry(year).or_insert(0);
        loop {
            let p = 10 + 17 * *k;
            *k += 1;
            if !RESERVED_PAGES.contains(&p) {
                return p;
            }
        }
    }
}

struct KeyGen {
    pages: PageAllocator,
    n_other: usize,
    n_self: usize,
}

impl KeyGen {
    fn other(&mut self, year: i32) -> String {
        let g = self.n_other;
        self.n_other += 1;
        let author = format!(
            "{} {}",
            SURNAMES[g % SURNAMES.len()],
            INITIALS[(g / SURNAMES.len()) % INITIALS.len()]
        );
        let source = SOURCES[(g * 7) % SOURCES.len()];
        let volume = 1 + (g * 13) % 180;
        format!("{author}, {year}, {source}, V{volume}, P{}", self.pages.page(year))
    }

    fn own(&mut self, year: i32) -> String {
        let g = self.n_self;
        self.n_self += 1;
        let page = self.pages.page(year);
        if year < 1961 {
            format!("GARFIELD E, {year}, AM DOC, V{}, P{page}", year - 1949)
        } else if g % 3 == 2 {
            format!("GARFIELD E, {year}, ESSAYS INFORMATION S, V{}, P{page}", 1 + g % 15)
        } else {
            format!("GARFIELD E, {year}, CURR CONTENTS, V{}, P{page}", year - 1942)
        }
    }
}

/// Splits `total` into `n` parts of at least one, roughly equal, with a
/// sum-preserving wobble.
fn split(total: u32, n: u32) -> Vec<u32> {
    let base = total / n;
    let rem = total % n;
    let mut parts: Vec<u32> = (0..n).map(|i| base + u32::from(i < rem)).collect();
    for k in 0..(n as usize / 2) {
        let d = [0, 1, 2, 3][k % 4].min(parts[2 * k + 1] - 1);
        parts[2 * k] += d;
        parts[2 * k + 1] -= d;
    }
    parts
}

/// Largest-remainder apportionment of `total` over `weights`.
fn apportion(total: u32, weights: &[u32]) -> Vec<u32> {
    let sum: u64 = weights.iter().map(|&w| u64::from(w)).sum();
    let mut out: Vec<u32> = weights
        .iter()
        .map(|&w| (u64::from(total) * u64::from(w) / sum) as u32)
        .collect();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse((u64::from(total) * u64::from(weights[i]) % sum, usize::MAX - i)));
    let short = total - out.iter().sum::<u32>();
    for &i in order.iter().take(short as usize) {
        out[i] += 1;
    }
    out
}

/// Every precise key of the corpus with its occurrence count and variants.
fn key_plan() -> Vec<(i32, String, u32, Vec<String>)> {
    let mut keygen = KeyGen {
        pages: PageAllocator::default(),
        n_other: 0,
        n_self: 0,
    };
    let mut plan: Vec<(i32, String, u32, Vec<String>)> = Vec::new();
    let push = |plan: &mut Vec<_>, raw: String, occ: u32, variants: Vec<String>| {
        let rpy = parse_cr_string(&raw)
            .ok()
            .and_then(|c| c.rpy)
            .expect("fixture keys carry a year");
        plan.push((rpy, raw, occ, variants));
    };

    for (raw, occ, variants) in named_keys() {
        push(&mut plan, raw, occ, variants);
    }
    for &(year, fillers) in NAMED_YEAR_FILLERS {
        for &occ in fillers {
            let raw = keygen.other(year);
            push(&mut plan, raw, occ, Vec::new());
        }
    }
    for (i, year) in sparse_years().into_iter().enumerate() {
        let pattern: &[u32] = if year == 1959 {
            &[2, 2, 2, 1, 1]
        } else if year >= 2003 {
            &[1, 1, 1, 1]
        } else {
            SPARSE_PATTERNS[i % SPARSE_PATTERNS.len()]
        };
        for &occ in pattern {
            let raw = keygen.other(year);
            push(&mut plan, raw, occ, Vec::new());
        }
    }

    let n_variants: u32 = plan.iter().map(|k| k.3.len() as u32).sum();
    let n_imprecise: u32 = IMPRECISE.iter().map(|&(_, n)| n).sum();
    let years = heavy_years();
    let light: u32 = plan.iter().filter(|k| !years.contains(&k.0)).map(|k| k.2).sum();
    let heavy_budget = TOTAL_OCCURRENCES - n_variants - n_imprecise - light;

    let fixed: BTreeMap<i32, u32> = HEAVY_TOTALS.iter().copied().collect();
    let plain: Vec<i32> = years.iter().copied().filter(|y| !fixed.contains_key(y)).collect();
    let spread = heavy_budget - fixed.values().sum::<u32>();
    let per_plain = split_even(spread, plain.len() as u32);
    let totals: Vec<u32> = years
        .iter()
        .map(|y| match fixed.get(y) {
            Some(&t) => t,
            None => per_plain[plain.iter().position(|p| p == y).unwrap()],
        })
        .collect();
    let remainders: Vec<u32> = years
        .iter()
        .zip(&totals)
        .map(|(&y, &t)| {
            let named: u32 = plan.iter().filter(|k| k.0 == y).map(|k| k.2).sum();
            t - named - MINORS_PER_HEAVY_YEAR
        })
        .collect();
    let counts = apportion(N_SMALL_SELF, &remainders);
    for ((&year, &rest), &n) in years.iter().zip(&remainders).zip(&counts) {
        for _ in 0..MINORS_PER_HEAVY_YEAR {
            let raw = keygen.other(year);
            push(&mut plan, raw, 1, Vec::new());
        }
        for occ in split(rest, n) {
            let raw = keygen.own(year);
            push(&mut plan, raw, occ, Vec::new());
        }
    }
    plan
}

fn split_even(total: u32, n: u32) -> Vec<u32> {
    (0..n).map(|i| total / n + u32::from(i < total % n)).collect()
}

/// Publication slots: venue, year, whether the paper has a reference list.
fn paper_slots() -> Vec<(String, i32, bool)> {
    let mut slots = Vec::new();
    let spread = |n: u32, lo: i32, hi: i32| -> Vec<i32> {
        let span = (hi - lo + 1) as u32;
        (0..n).map(|i| lo + (i * span / n.max(1)) as i32).collect()
    };
    for v in VENUES {
        let (n, lo, hi) = v.in_window;
        for y in spread(n, lo, hi).into_iter().chain(v.outside.iter().copied()) {
            slots.push((v.name.to_string(), y, v.has_refs));
        }
    }
    for y in spread(SCIENTIST_LATE, 1991, 2000) {
        slots.push(("SCIENTIST".to_string(), y, false));
    }

    let mut others = Vec::new();
    let names: Vec<String> = SUBJECTS
        .iter()
        .flat_map(|s| PREFIXES.iter().map(move |p| format!("{p} {s}")))
        .take(115)
        .collect();
    for (i, name) in names.iter().enumerate() {
        let copies = match i {
            0..=69 => 1,
            70..=99 => 2,
            100..=111 => 3,
            _ => 4,
        };
        others.extend(std::iter::repeat_n(name.clone(), copies));
    }
    let n = others.len();
    let outside: HashSet<usize> = (0..OTHER_OUTSIDE.len()).map(|k| k * n / OTHER_OUTSIDE.len()).collect();
    let inside_years = spread((n - outside.len()) as u32, 1970, 1990);
    let (mut next_out, mut next_in) = (0, 0);
    for (i, name) in others.into_iter().enumerate() {
        let year = if outside.contains(&i) {
            next_out += 1;
            OTHER_OUTSIDE[next_out - 1]
        } else {
            next_in += 1;
            inside_years[next_in - 1]
        };
        slots.push((name, year, true));
    }
    slots.sort();
    slots
}

/// Picks `n` distinct eligible records, least loaded first.
fn pick(load: &mut [u32], eligible: &[usize], n: u32) -> Vec<usize> {
    let mut cand = eligible.to_vec();
    cand.sort_by_key(|&i| (load[i], i));
    cand.truncate(n as usize);
    assert_eq!(cand.len(), n as usize, "not enough citing records");
    for &i in &cand {
        load[i] += 1;
    }
    cand
}

/// The fixture corpus.
pub fn garfield_like() -> Vec<Record> {
    let slots = paper_slots();
    let mut plan = key_plan();
    // recent keys have the fewest candidate citers, so they go first
    plan.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| b.2.cmp(&a.2)).then_with(|| a.1.cmp(&b.1)));

    let mut refs: Vec<Vec<String>> = vec![Vec::new(); slots.len()];
    let mut load = vec![0u32; slots.len()];
    for (rpy, raw, occ, variants) in &plan {
        let eligible: Vec<usize> = (0..slots.len()).filter(|&i| slots[i].2 && slots[i].1 >= *rpy).collect();
        let citers = pick(&mut load, &eligible, *occ);
        for &i in &citers {
            refs[i].push(raw.clone());
        }
        for (variant, &i) in variants.iter().zip(&citers) {
            refs[i].push(variant.clone());
            load[i] += 1;
        }
    }
    let all: Vec<usize> = (0..slots.len()).filter(|&i| slots[i].2).collect();
    for &(raw, n) in IMPRECISE {
        for i in pick(&mut load, &all, n) {
            refs[i].push(raw.to_string());
        }
    }

    let me = normalize_author(SELF_AUTHOR).expect("valid author");
    slots
        .into_iter()
        .zip(refs)
        .enumerate()
        .map(|(i, ((venue, pub_year, _), mut raws))| {
            raws.sort();
            let mut authors = vec![me.clone()];
            if i % 9 == 4 {
                authors.push(normalize_author(COAUTHORS[(i / 9) % COAUTHORS.len()]).expect("valid author"));
            }
            Record {
                record_id: format!("GLX:{:06}", i + 1),
                authors,
                pub_year,
                venue,
                cited_refs: raws
                    .iter()
                    .map(|r| parse_cr_string(r).expect("fixture CR parses"))
                    .collect(),
                times_cited: Some(((i * 53 + 7) % 120) as u64),
            }
        })
        .collect()
}

/// The fixture rendered as a tagged plaintext export.
pub fn garfield_like_export() -> String {
    write_export(&garfield_like(), ExportFormat::TaggedPlaintext)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_counts() {
        use crate::corpus::CorpusStats;
        let records = garfield_like();
        let stats = CorpusStats::compute(&records);
        assert_eq!(stats.n_records, 1558);
        assert_eq!(stats.n_cr_occurrences, 15890);
        assert_eq!(stats.year_span, Some((1954, 2016)));
        for r in &records {
            let distinct: HashSet<&str> = r.cited_refs.iter().map(|c| c.raw.as_str()).collect();
            assert_eq!(distinct.len(), r.cited_refs.len(), "{}", r.record_id);
            assert!(r.cited_refs.iter().all(|c| c.rpy.is_none_or(|y| y <= r.pub_year)));
        }
    }

    #[test]
    fn split_preserves_sum() {
        for (t, n) in [(327, 30), (898, 83), (5, 5), (100, 7)] {
            let parts = split(t, n);
            assert_eq!(parts.len(), n as usize);
            assert_eq!(parts.iter().sum::<u32>(), t);
            assert!(parts.iter().all(|&p| p >= 1));
        }
    }

    #[test]
    fn apportion_hits_total() {
        let out = apportion(10, &[1, 1, 1]);
        assert_eq!(out, [4, 3, 3]);
        assert_eq!(apportion(1269, &[5, 900, 77]).iter().sum::<u32>(), 1269);
    }

    #[test]
    fn generated_pages_avoid_reserved_ones() {
        let mut pages = PageAllocator::default();
        let got: Vec<u32> = (0..200).map(|_| pages.page(1951)).collect();
        assert!(!got.contains(&265));
        let unique: HashSet<u32> = got.iter().copied().collect();
        assert_eq!(unique.len(), got.len());
    }
}
