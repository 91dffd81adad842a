//! Align two embedding spaces with an orthogonal transform fitted on an
//! identity seed lexicon, then translate words across them.
//!
//! Both sides are trained on the same corpus with different seeds, so
//! almost every word should translate to itself.
//!
//! Run with: cargo run --release --example align_and_translate

use newspolar::alignment::{
    build_seed_lexicon, fit_procrustes, translate, TranslationMethod,
};
use newspolar::embeddings::{normalize, train, TrainConfig, Vocabulary};
use newspolar::synthetic::MarkovTemplate;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let template = MarkovTemplate::new(300, 5, 21);
    let corpus = template.generate(120_000, 15, 22);
    let vocab = Vocabulary::build(corpus.iter().map(|d| d.iter()), 5)?;
    let config = TrainConfig {
        dim: 48,
        buckets: 1 << 16,
        n_max: 5,
        ..TrainConfig::default()
    };
    let (model_a, _) = train(corpus.iter().map(|d| d.iter()), &vocab, &config, 1, 1)?;
    let (model_b, _) = train(corpus.iter().map(|d| d.iter()), &vocab, &config, 2, 1)?;

    let seeds = build_seed_lexicon(model_a.vocab(), model_b.vocab(), 200)?;
    println!(
        "seed lexicon: {} identity pairs, min shared count {}",
        seeds.pairs.len(),
        seeds.min_frequency
    );

    let (mut x, mut y) = (Vec::new(), Vec::new());
    for (s, t) in &seeds.pairs {
        let mut sv = model_a.vector(s)?;
        let mut tv = model_b.vector(t)?;
        normalize(&mut sv);
        normalize(&mut tv);
        x.push(sv);
        y.push(tv);
    }
    let (transform, warnings) = fit_procrustes(&x, &y)?;
    for w in warnings {
        eprintln!("warning: {w}");
    }
    println!(
        "transform: {} seeds, mean aligned cosine {:.4}, orthogonality defect {:.2e}\n",
        transform.seed_pairs,
        transform.mean_seed_cosine,
        transform.orthogonality_defect()
    );

    let mut identical = 0;
    let probes = 30;
    for idx in 0..probes {
        let word = &model_a.vocab().word(idx).token;
        let pair = translate(word, &model_a, &model_b, &transform, TranslationMethod::NearestNeighbor)?;
        if pair.target == *word {
            identical += 1;
        } else {
            println!("  {word} -> {} (cosine {:.3})", pair.target, pair.aligned_cosine);
        }
    }
    println!("{identical}/{probes} frequent words translate to themselves");

    // The inverted softmax demotes hub targets; on a duplicate corpus it
    // should agree with plain nearest neighbour.
    let word = &model_a.vocab().word(0).token;
    let is = translate(
        word,
        &model_a,
        &model_b,
        &transform,
        TranslationMethod::InvertedSoftmax { temperature: 10.0 },
    )?;
    println!("inverted softmax: {word} -> {}", is.target);
    Ok(())
}
