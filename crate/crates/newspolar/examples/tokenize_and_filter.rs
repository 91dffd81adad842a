//! Tokenization and boolean topic filtering.
//!
//! Run with: cargo run --example tokenize_and_filter

use chrono::NaiveDate;
use newspolar::corpus::{tokenize, Document, QueryFilter};

fn main() {
    let samples = [
        "Syrian refugees fled across the border in 2015.",
        "An asylum-seeker's journey from Syria",
        "Asylum seekers wait at the station",
        "Local election results announced",
    ];
    for text in samples {
        println!("{text:?}\n  tokens: {:?}", tokenize(text));
    }

    let query = QueryFilter::default();
    println!("\nquery: {:?} AND {:?}", query.group_a, query.group_b);
    let date = NaiveDate::from_ymd_opt(2016, 1, 1).unwrap();
    for (title, body) in [
        ("Refugee families", "crossing from Syria"),
        ("Refugee families", "crossing the sea"),
        ("An asylumseeker from Syria", ""),
        ("Displaced by the Syrian conflict", ""),
    ] {
        let doc = Document::new("d", "u", "o", date, title, body);
        println!("  match={} {title:?} / {body:?}", query.matches(&doc));
    }
}
