//! Train subword skip-gram embeddings on a synthetic corpus and browse
//! nearest neighbours, including an out-of-vocabulary query served by
//! subwords alone.
//!
//! Run with: cargo run --release --example train_embeddings

use newspolar::embeddings::{cosine, train, TrainConfig, Vocabulary};
use newspolar::synthetic::MarkovTemplate;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let template = MarkovTemplate::new(300, 5, 11);
    let docs = template.generate(120_000, 15, 12);
    let vocab = Vocabulary::build(docs.iter().map(|d| d.iter()), 5)?;
    println!("corpus: {} docs, vocab {}", docs.len(), vocab.len());

    let config = TrainConfig {
        dim: 48,
        buckets: 1 << 16,
        n_max: 5,
        ..TrainConfig::default()
    };
    let (model, stats) = train(docs.iter().map(|d| d.iter()), &vocab, &config, 7, 1)?;
    println!("epoch losses: {:?}", stats.epoch_losses);

    let probe = &model.vocab().word(0).token;
    let probe_vec = model.vector(probe)?;
    let mut neighbours: Vec<(f64, &str)> = model
        .vocab()
        .words()
        .iter()
        .enumerate()
        .filter(|(_, w)| &w.token != probe)
        .map(|(i, w)| (cosine(&probe_vec, &model.vector_by_idx(i as u32)), w.token.as_str()))
        .collect();
    neighbours.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    println!("\nnearest neighbours of {probe:?}:");
    for (sim, word) in neighbours.iter().take(5) {
        println!("  {sim:.3}  {word}");
    }

    // A token never seen in training still gets a subword vector.
    let oov = format!("{}ish", probe);
    let oov_vec = model.vector(&oov)?;
    println!(
        "\nout-of-vocabulary {oov:?}: cosine to {probe:?} = {:.3}",
        cosine(&oov_vec, &probe_vec)
    );
    Ok(())
}
