//! Rule-based sentiment scoring with the shipped valence lexicon.
//!
//! Run with: cargo run --example sentiment_scores

use std::path::Path;

use newspolar::sentiment::{score_text, SentimentLexicon};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let lexicon_path =
        Path::new(env!("CARGO_MANIFEST_DIR")).join("data/sentiment_lexicon.tsv");
    let (lexicon, report) = SentimentLexicon::load(&lexicon_path)?;
    println!(
        "lexicon: {} entries ({} skipped)\n",
        lexicon.len(),
        report.skipped
    );

    let texts = [
        "Volunteers warmly welcomed the new families.",
        "The ceasefire collapsed and violence returned.",
        "The committee will meet on Tuesday.",
        "This is not a good outcome.",
        "The program was very successful!",
        "The shelter is clean, but the food is terrible.",
    ];
    println!("{:<55} {:>8} {:>6} {:>6} {:>6}  class", "text", "compound", "pos", "neu", "neg");
    for text in texts {
        let s = score_text(text, &lexicon);
        println!(
            "{:<55} {:>8.4} {:>6.3} {:>6.3} {:>6.3}  {}",
            text,
            s.compound,
            s.positive,
            s.neutral,
            s.negative,
            s.class()
        );
    }
    Ok(())
}
