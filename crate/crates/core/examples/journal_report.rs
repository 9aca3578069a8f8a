//! Venue table and a publication window, as text and CSV.

use rpys::report::{journal_table, window_stats, write_csv, Table};
use rpys::synthetic;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let records = synthetic::garfield_like();
    let table = journal_table(&records, 10)?;
    for r in &table.rows {
        println!("{:>5} {:>6}  {}", r.n_papers, r.share.percent(), r.venue);
    }
    println!(
        "listed venues cover {} of {} records",
        table.cumulative_share.percent(),
        table.n_records
    );

    let w = window_stats(&records, 1961, 2002, Some("Current Contents"))?;
    println!(
        "\n{}-{}: {} records ({}), {} per year, {} in {}",
        w.y0,
        w.y1,
        w.n_in_window,
        w.share_of_corpus.percent(),
        w.papers_per_year_mean.to_decimal_string(),
        w.share_in_named_venue.map(|s| s.percent()).unwrap_or_default(),
        w.venue.unwrap_or_default()
    );

    println!();
    print!("{}", String::from_utf8(write_csv(Table::Journals(&table))?)?);
    Ok(())
}
