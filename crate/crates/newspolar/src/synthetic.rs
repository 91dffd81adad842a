//! Deterministic synthetic corpora and a self-contained pipeline fixture.
//!
//! The generators exist so the pipeline can be exercised end to end
//! without any proprietary news archive: a seeded Markov chain over a
//! random vocabulary gives every token a distinctive context signature,
//! which is what embedding alignment needs to have something to recover.
//! Swapping two tokens throughout one corpus plants a known misaligned
//! pair.

use std::collections::{HashMap, HashSet};
use std::io::Write;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::corpus::DocumentRecord;
use crate::{Error, Result};

/// Sparse first-order Markov chain over a vocabulary of random distinct
/// words. Each state prefers a small fixed successor set, so every word
/// acquires its own context distribution.
#[derive(Debug, Clone)]
pub struct MarkovTemplate {
    words: Vec<String>,
    successors: Vec<Vec<u32>>,
}

/// Tokens the generator must never produce, so synthetic text cannot
/// collide with query terms.
const RESERVED: &[&str] = &[
    "refugee", "asylum-seeker", "asylumseeker", "migrant", "immigrant", "displaced", "syria",
    "syrian",
];

fn random_word(rng: &mut ChaCha20Rng) -> String {
    let len = rng.gen_range(5..=9);
    (0..len)
        .map(|_| (b'a' + rng.gen_range(0..26u8)) as char)
        .collect()
}

impl MarkovTemplate {
    /// Build a template with `vocab_size` states, each preferring
    /// `branch` successors. Deterministic in `seed`.
    pub fn new(vocab_size: usize, branch: usize, seed: u64) -> Self {
        assert!(vocab_size >= 2, "need at least two states");
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let mut seen: HashSet<String> = RESERVED.iter().map(|s| s.to_string()).collect();
        let mut words = Vec::with_capacity(vocab_size);
        while words.len() < vocab_size {
            let w = random_word(&mut rng);
            if seen.insert(w.clone()) {
                words.push(w);
            }
        }
        let successors = (0..vocab_size)
            .map(|state| {
                let mut set = Vec::with_capacity(branch);
                while set.len() < branch.min(vocab_size - 1) {
                    let next = rng.gen_range(0..vocab_size as u32);
                    if next as usize != state && !set.contains(&next) {
                        set.push(next);
                    }
                }
                set
            })
            .collect();
        MarkovTemplate { words, successors }
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    /// Generate documents of `doc_len` tokens until `total_tokens` have
    /// been produced. A walk follows the preferred successors nine times
    /// out of ten and teleports uniformly otherwise. Deterministic in
    /// `seed`.
    pub fn generate(&self, total_tokens: usize, doc_len: usize, seed: u64) -> Vec<Vec<String>> {
        assert!(doc_len >= 1);
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let n = self.words.len();
        let mut docs = Vec::new();
        let mut produced = 0usize;
        while produced < total_tokens {
            // Start states are rank-biased so the corpus has a frequency
            // gradient instead of a flat profile.
            let mut state = (rng.gen::<f64>().powi(2) * n as f64) as usize % n;
            let mut doc = Vec::with_capacity(doc_len);
            for _ in 0..doc_len {
                doc.push(self.words[state].clone());
                produced += 1;
                state = if rng.gen::<f64>() < 0.9 {
                    let options = &self.successors[state];
                    options[rng.gen_range(0..options.len())] as usize
                } else {
                    rng.gen_range(0..n)
                };
            }
            docs.push(doc);
        }
        docs
    }
}

/// Exchange the members of each pair wherever they occur.
pub fn swap_tokens(docs: &mut [Vec<String>], pairs: &[(String, String)]) {
    let mut map: HashMap<&str, &str> = HashMap::new();
    for (a, b) in pairs {
        map.insert(a.as_str(), b.as_str());
        map.insert(b.as_str(), a.as_str());
    }
    for doc in docs.iter_mut() {
        for tok in doc.iter_mut() {
            if let Some(replacement) = map.get(tok.as_str()) {
                *tok = replacement.to_string();
            }
        }
    }
}

/// Most frequent template words of a generated corpus, for picking
/// planted pairs.
pub fn top_frequent(docs: &[Vec<String>], n: usize) -> Vec<String> {
    let mut counts: HashMap<&str, u64> = HashMap::new();
    for doc in docs {
        for tok in doc {
            *counts.entry(tok.as_str()).or_insert(0) += 1;
        }
    }
    let mut entries: Vec<(&str, u64)> = counts.into_iter().collect();
    entries.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    entries.into_iter().take(n).map(|(t, _)| t.to_string()).collect()
}

/// Size knobs of the generated pipeline fixture.
#[derive(Debug, Clone, Copy)]
pub struct FixtureSpec {
    pub left_docs: usize,
    pub right_docs: usize,
    pub other_docs: usize,
    pub sentences_per_doc: usize,
    pub sentence_len: usize,
    pub vocab_size: usize,
    pub planted_pairs: usize,
}

impl Default for FixtureSpec {
    fn default() -> Self {
        FixtureSpec {
            left_docs: 900,
            right_docs: 900,
            other_docs: 240,
            sentences_per_doc: 6,
            sentence_len: 13,
            vocab_size: 420,
            planted_pairs: 10,
        }
    }
}

/// Everything a pipeline run needs, written under one directory.
#[derive(Debug, Clone)]
pub struct FixturePaths {
    pub dir: PathBuf,
    pub config: PathBuf,
    pub documents: PathBuf,
    pub outlets: PathBuf,
    pub external_scores: PathBuf,
    pub sentiment_lexicon: PathBuf,
    pub offensive_lexicon: PathBuf,
    /// The token pairs exchanged between the left and right sub-corpora.
    pub planted: Vec<(String, String)>,
}

const FIXTURE_SENTIMENT_LEXICON: &str = "\
welcomed\t1.9\nwelcome\t2.0\nsafe\t1.9\nhope\t1.9\nsupport\t1.7\ngenerous\t2.3\n\
kind\t2.4\nhelp\t1.7\nrelief\t1.9\nrescued\t1.8\nthriving\t2.5\nimproved\t1.9\n\
crisis\t-2.5\nthreat\t-2.4\nviolence\t-3.1\nfear\t-2.2\ndanger\t-2.4\nburden\t-1.9\n\
illegal\t-2.0\ninvasion\t-2.3\nchaos\t-2.6\nsuffering\t-2.4\nhostile\t-2.3\nscum\t-2.8\n\
vermin\t-2.9\nparasites\t-2.7\n";

const FIXTURE_OFFENSIVE_LEXICON: &str = "scum\nvermin\nparasites\nfilth\nsavages\n";

const LEFT_FLAVOR: &[&str] = &["welcomed", "safe", "hope", "support", "relief"];
const RIGHT_FLAVOR: &[&str] = &["crisis", "threat", "violence", "danger", "burden"];
const RIGHT_OFFENSIVE: &[&str] = &["scum", "vermin", "parasites"];

// Fixture timeline: 2011-03 .. 2021-06 inclusive.
const FIRST_MONTH: i64 = 2011 * 12 + 2;
const N_MONTHS: i64 = 124;

fn fixture_date(rng: &mut ChaCha20Rng) -> NaiveDate {
    let month_index = FIRST_MONTH + rng.gen_range(0..N_MONTHS);
    let year = (month_index / 12) as i32;
    let month = (month_index % 12 + 1) as u32;
    let day = rng.gen_range(1..=28);
    NaiveDate::from_ymd_opt(year, month, day).expect("valid synthetic date")
}

/// Write a complete synthetic input set: outlet registry, document
/// stream (all five buckets populated, left/right carrying planted
/// swapped pairs), an external score file, both lexicons, and a config
/// pointing at all of them. Deterministic in `seed`.
pub fn write_pipeline_fixture(dir: &Path, seed: u64, spec: &FixtureSpec) -> Result<FixturePaths> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let template = MarkovTemplate::new(spec.vocab_size, 5, seed);
    let mut rng = ChaCha20Rng::seed_from_u64(seed.wrapping_add(1));

    // Planted pairs from the most frequent template words of a probe
    // corpus, paired off in frequency order.
    let probe = template.generate(40_000, spec.sentence_len, seed.wrapping_add(2));
    let frequent = top_frequent(&probe, spec.planted_pairs * 2);
    let planted: Vec<(String, String)> = frequent
        .chunks(2)
        .filter(|c| c.len() == 2)
        .map(|c| (c[0].clone(), c[1].clone()))
        .collect();

    let outlets = [
        ("rollinghill", "Rolling Hill", -0.9),
        ("thecommons", "The Commons", -0.7),
        ("fortuna", "Fortuna Daily", -0.5),
        ("gazette", "Morning Gazette", -0.3),
        ("wireline", "Wireline News", -0.1),
        ("broadcast", "Broadcast Eight", 0.1),
        ("redledger", "Red Ledger", 0.3),
        ("nationalpost", "National Signal", 0.5),
        ("bluffside", "Bluffside Review", 0.7),
        ("firebrand", "Firebrand Report", 0.9),
    ];
    let outlets_path = dir.join("outlets.csv");
    {
        let mut w = String::from("outlet_id,name,partisanship\n");
        for (id, name, score) in outlets {
            w.push_str(&format!("{id},{name},{score}\n"));
        }
        std::fs::write(&outlets_path, w).map_err(|e| Error::io(&outlets_path, e))?;
    }

    // Bucket -> outlet ids (two per bucket, alternating).
    let bucket_outlets: [&[&str]; 5] = [
        &["rollinghill", "thecommons"],
        &["fortuna", "gazette"],
        &["wireline", "broadcast"],
        &["redledger", "nationalpost"],
        &["bluffside", "firebrand"],
    ];

    let tokens_per_doc = spec.sentences_per_doc * spec.sentence_len;
    let mut records: Vec<DocumentRecord> = Vec::new();
    let mut score_lines: Vec<String> = Vec::new();
    let mut doc_counter = 0usize;

    let mut emit_doc = |bucket_idx: usize,
                        body_tokens: Vec<Vec<String>>,
                        rng: &mut ChaCha20Rng,
                        records: &mut Vec<DocumentRecord>,
                        score_lines: &mut Vec<String>| {
        let date = fixture_date(rng);
        let id = format!("doc-{doc_counter:05}");
        doc_counter += 1;
        let outlet_pool = bucket_outlets[bucket_idx];
        let outlet = outlet_pool[doc_counter % outlet_pool.len()];

        let mut sentences: Vec<String> = body_tokens.iter().map(|s| s.join(" ")).collect();
        // Bucket flavor: sentiment vocabulary, and offensive terms on
        // the right that intensify late in the timeline.
        match bucket_idx {
            0 | 1 => {
                let w = LEFT_FLAVOR[rng.gen_range(0..LEFT_FLAVOR.len())];
                sentences.push(format!("local groups {w} the new families"));
            }
            3 | 4 => {
                let w = RIGHT_FLAVOR[rng.gen_range(0..RIGHT_FLAVOR.len())];
                sentences.push(format!("officials called the arrivals a {w}"));
                let late = date >= NaiveDate::from_ymd_opt(2019, 10, 1).unwrap();
                if bucket_idx == 4 && (late || rng.gen::<f64>() < 0.15) {
                    let o = RIGHT_OFFENSIVE[rng.gen_range(0..RIGHT_OFFENSIVE.len())];
                    sentences.push(format!("commenters branded them {o}"));
                }
            }
            _ => {}
        }
        let body = sentences.join(". ");
        let title = "Syrian refugees and the migrant crisis".to_string();
        records.push(DocumentRecord {
            id: id.clone(),
            url: format!("http://example.test/{id}"),
            outlet_id: outlet.to_string(),
            published: date,
            title,
            body: body.clone(),
        });

        // External classifier scores, derived from the injected terms.
        let tokens = crate::corpus::tokenize(&body);
        let offensive_hits = tokens
            .iter()
            .filter(|t| RIGHT_OFFENSIVE.contains(&t.as_str()))
            .count();
        let offensive = (offensive_hits as f64 * 0.25).min(0.8);
        let hate = 0.02;
        let normal = 1.0 - offensive - hate;
        let label = if offensive > normal { "offensive" } else { "normal" };
        score_lines.push(format!(
            r#"{{"doc_id":"{id}","label":"{label}","scores":{{"hate":{hate},"offensive":{offensive},"normal":{normal}}},"truncation":512}}"#
        ));
    };

    // Left and right sub-corpora share the template; the right side gets
    // the planted swap. Center buckets get a smaller, unswapped share.
    let left_tokens = spec.left_docs * tokens_per_doc;
    let left_docs = template.generate(left_tokens, spec.sentence_len, seed.wrapping_add(3));
    let right_tokens = spec.right_docs * tokens_per_doc;
    let mut right_docs = template.generate(right_tokens, spec.sentence_len, seed.wrapping_add(4));
    swap_tokens(&mut right_docs, &planted);
    let other_tokens = spec.other_docs * tokens_per_doc;
    let other_docs = template.generate(other_tokens, spec.sentence_len, seed.wrapping_add(5));

    let mut pack = |sentences: &[Vec<String>],
                    count: usize,
                    bucket_split: &[usize],
                    rng: &mut ChaCha20Rng,
                    records: &mut Vec<DocumentRecord>,
                    score_lines: &mut Vec<String>| {
        let mut cursor = 0usize;
        for i in 0..count {
            let mut body = Vec::with_capacity(spec.sentences_per_doc);
            for _ in 0..spec.sentences_per_doc {
                if cursor < sentences.len() {
                    body.push(sentences[cursor].clone());
                    cursor += 1;
                }
            }
            if body.is_empty() {
                break;
            }
            let bucket = bucket_split[i % bucket_split.len()];
            emit_doc(bucket, body, rng, records, score_lines);
        }
    };

    pack(&left_docs, spec.left_docs, &[0], &mut rng, &mut records, &mut score_lines);
    pack(&right_docs, spec.right_docs, &[4], &mut rng, &mut records, &mut score_lines);
    pack(&other_docs, spec.other_docs, &[1, 2, 3], &mut rng, &mut records, &mut score_lines);

    let documents_path = dir.join("documents.jsonl");
    {
        let file = std::fs::File::create(&documents_path)
            .map_err(|e| Error::io(&documents_path, e))?;
        let mut w = std::io::BufWriter::new(file);
        for r in &records {
            let line = serde_json::to_string(r)
                .map_err(|e| Error::domain(format!("serialize fixture record: {e}")))?;
            writeln!(w, "{line}").map_err(|e| Error::io(&documents_path, e))?;
        }
        w.flush().map_err(|e| Error::io(&documents_path, e))?;
    }

    let external_scores = dir.join("scores.jsonl");
    std::fs::write(&external_scores, score_lines.join("\n") + "\n")
        .map_err(|e| Error::io(&external_scores, e))?;

    let sentiment_lexicon = dir.join("sentiment_lexicon.tsv");
    std::fs::write(&sentiment_lexicon, FIXTURE_SENTIMENT_LEXICON)
        .map_err(|e| Error::io(&sentiment_lexicon, e))?;
    let offensive_lexicon = dir.join("offensive_terms.txt");
    std::fs::write(&offensive_lexicon, FIXTURE_OFFENSIVE_LEXICON)
        .map_err(|e| Error::io(&offensive_lexicon, e))?;

    let config = dir.join("config.toml");
    std::fs::write(
        &config,
        format!(
            r#"version = 1
seed = {seed}
workers = 1

[paths]
documents = "documents.jsonl"
outlets = "outlets.csv"
sentiment_lexicon = "sentiment_lexicon.tsv"
offensive_lexicon = "offensive_terms.txt"
external_scores = "scores.jsonl"
output_dir = "out"

[query]
group_a = ["refugee", "asylum-seeker", "migrant", "immigrant", "displaced"]
group_b = ["syria", "syrian"]

[embedding]
dim = 48
window = 5
negatives = 5
epochs = 4
learning_rate = 0.05
min_count = 5
n_min = 3
n_max = 5
buckets = 32768

[alignment]
direction = "left-to-right"
method = "nearest-neighbor"
softmax_temperature = 10.0
top_k = 200
top_n_seeds = 300
context_pairs = 5
contexts_per_pair = 2

[analytics]
window = 3
metrics = ["count", "sentiment_compound", "offensive"]
"#
        ),
    )
    .map_err(|e| Error::io(&config, e))?;

    Ok(FixturePaths {
        dir: dir.to_path_buf(),
        config,
        documents: documents_path,
        outlets: outlets_path,
        external_scores,
        sentiment_lexicon,
        offensive_lexicon,
        planted,
    })
}
