//! Plant swapped word pairs between two corpora, then mine the
//! frequency-ranked pairs whose cross-corpus translation differs.
//!
//! Run with: cargo run --release --example mine_misaligned

use newspolar::alignment::{
    build_seed_lexicon, fit_procrustes, mine_misaligned, TranslationMethod,
};
use newspolar::embeddings::{normalize, train, TrainConfig, Vocabulary};
use newspolar::synthetic::{swap_tokens, top_frequent, MarkovTemplate};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let template = MarkovTemplate::new(300, 5, 31);
    let docs_a = template.generate(120_000, 15, 32);
    let mut docs_b = template.generate(120_000, 15, 33);

    // Exchange five frequent pairs everywhere in corpus B.
    let frequent = top_frequent(&docs_a, 10);
    let planted: Vec<(String, String)> = frequent
        .chunks(2)
        .map(|c| (c[0].clone(), c[1].clone()))
        .collect();
    swap_tokens(&mut docs_b, &planted);
    println!("planted swaps: {planted:?}\n");

    let config = TrainConfig {
        dim: 48,
        buckets: 1 << 16,
        n_max: 5,
        ..TrainConfig::default()
    };
    let vocab_a = Vocabulary::build(docs_a.iter().map(|d| d.iter()), 5)?;
    let vocab_b = Vocabulary::build(docs_b.iter().map(|d| d.iter()), 5)?;
    let (model_a, _) = train(docs_a.iter().map(|d| d.iter()), &vocab_a, &config, 1, 1)?;
    let (model_b, _) = train(docs_b.iter().map(|d| d.iter()), &vocab_b, &config, 2, 1)?;

    let seeds = build_seed_lexicon(model_a.vocab(), model_b.vocab(), 200)?;
    let (mut x, mut y) = (Vec::new(), Vec::new());
    for (s, t) in &seeds.pairs {
        let mut sv = model_a.vector(s)?;
        let mut tv = model_b.vector(t)?;
        normalize(&mut sv);
        normalize(&mut tv);
        x.push(sv);
        y.push(tv);
    }
    let (transform, _) = fit_procrustes(&x, &y)?;

    let report = mine_misaligned(
        &model_a,
        &model_b,
        &transform,
        TranslationMethod::NearestNeighbor,
        15,
    )?;
    println!(
        "examined {} words, reporting top {} misaligned:",
        report.examined_words,
        report.pairs.len()
    );
    let mut csv = Vec::new();
    report.write_csv(&mut csv)?;
    print!("{}", String::from_utf8(csv)?);

    let recovered = planted
        .iter()
        .filter(|(a, b)| {
            report
                .pairs
                .iter()
                .any(|p| (&p.source == a && &p.target == b) || (&p.source == b && &p.target == a))
        })
        .count();
    println!("\nrecovered {recovered}/{} planted pairs", planted.len());
    Ok(())
}
