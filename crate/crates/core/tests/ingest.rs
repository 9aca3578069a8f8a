mod common;

use std::fs::File;

use rpys::corpus::{load_corpus, parse_export, parse_export_str, save_corpus, write_export, CorpusStats, ExportFormat};
use rpys::synthetic;

#[test]
fn fixture_is_current() {
    let on_disk = std::fs::read_to_string(common::fixture_path()).unwrap();
    assert!(
        on_disk == synthetic::garfield_like_export(),
        "fixture is stale; run `cargo run --example garfield_fixture -- fixtures/garfield_like.txt`"
    );
}

#[test]
fn tagged_and_tab_exports_agree() {
    let tagged = parse_export(
        File::open(common::fixture_path()).unwrap(),
        ExportFormat::TaggedPlaintext,
    )
    .unwrap();
    assert!(
        tagged.warnings.is_empty(),
        "{:?}",
        &tagged.warnings[..3.min(tagged.warnings.len())]
    );
    let tab_text = write_export(&tagged.records, ExportFormat::TabDelimited);
    let tab = parse_export_str(&tab_text, ExportFormat::TabDelimited).unwrap();
    assert!(tab.warnings.is_empty());
    assert_eq!(tab.records, tagged.records);

    let stats = CorpusStats::compute(&tab.records);
    assert_eq!(stats, CorpusStats::compute(&tagged.records));
    assert_eq!((stats.n_records, stats.n_cr_occurrences), (1558, 15890));
}

#[test]
fn stored_corpus_round_trips() {
    let records = synthetic::garfield_like();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.db");
    let stats = save_corpus(&records, &path).unwrap();
    assert_eq!(stats.n_records, 1558);
    assert_eq!(load_corpus(&path).unwrap(), records);
}

#[test]
fn crs_keep_their_verbatim_text() {
    let tagged = parse_export_str(&synthetic::garfield_like_export(), ExportFormat::TaggedPlaintext).unwrap();
    for (a, b) in tagged.records.iter().zip(synthetic::garfield_like()) {
        let raws: Vec<&str> = a.cited_refs.iter().map(|c| c.raw.as_str()).collect();
        let expected: Vec<&str> = b.cited_refs.iter().map(|c| c.raw.as_str()).collect();
        assert_eq!(raws, expected, "{}", a.record_id);
    }
}
