//! Subword-augmented skip-gram embeddings with negative sampling, one
//! model per sub-corpus.
//!
//! A word's representation is its word vector plus the vectors of its
//! hashed character n-gram buckets, so unseen words still get vectors
//! from their subwords alone. Training is plain SGD over the skip-gram
//! negative-sampling objective; with a fixed seed and one worker the
//! result is bit-reproducible.

mod io;
mod subword;
mod train;

pub use io::{read_binary, write_binary, write_text};
pub use subword::{fnv1a64, ngram_buckets};
pub use train::{batch_gradients, batch_loss, train, CheckExample, TrainStats};

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::corpus::{CorpusStore, PartisanBucket};
use crate::{Error, Result};

/// Frequency-filtered vocabulary of one sub-corpus. Words are ordered by
/// count (descending) then token, so indices are deterministic.
#[derive(Debug, Clone, PartialEq)]
pub struct Vocabulary {
    words: Vec<VocabWord>,
    index: HashMap<String, u32>,
    min_count: u64,
    total_tokens: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VocabWord {
    pub token: String,
    pub count: u64,
}

impl Vocabulary {
    /// Count tokens over the documents of a partition and keep those
    /// with at least `min_count` occurrences.
    pub fn build<'a, I, T>(docs: I, min_count: u64) -> Result<Vocabulary>
    where
        I: IntoIterator<Item = T>,
        T: IntoIterator<Item = &'a String>,
    {
        let mut counts: HashMap<String, u64> = HashMap::new();
        let mut total_tokens = 0u64;
        let mut saw_any = false;
        for doc in docs {
            for token in doc {
                saw_any = true;
                total_tokens += 1;
                *counts.entry(token.clone()).or_insert(0) += 1;
            }
        }
        if !saw_any {
            return Err(Error::domain(
                "cannot build a vocabulary from an empty partition",
            ));
        }
        let mut words: Vec<VocabWord> = counts
            .into_iter()
            .filter(|(_, c)| *c >= min_count)
            .map(|(token, count)| VocabWord { token, count })
            .collect();
        words.sort_unstable_by(|a, b| b.count.cmp(&a.count).then_with(|| a.token.cmp(&b.token)));
        let index = words
            .iter()
            .enumerate()
            .map(|(i, w)| (w.token.clone(), i as u32))
            .collect();
        Ok(Vocabulary {
            words,
            index,
            min_count,
            total_tokens,
        })
    }

    /// Vocabulary of one partisan bucket of a store.
    pub fn from_store(store: &CorpusStore, bucket: PartisanBucket, min_count: u64) -> Result<Self> {
        Self::build(
            store.bucket_documents(bucket).iter().map(|d| d.tokens()),
            min_count,
        )
    }

    pub(crate) fn from_parts(words: Vec<VocabWord>, min_count: u64, total_tokens: u64) -> Self {
        let index = words
            .iter()
            .enumerate()
            .map(|(i, w)| (w.token.clone(), i as u32))
            .collect();
        Vocabulary {
            words,
            index,
            min_count,
            total_tokens,
        }
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn idx(&self, token: &str) -> Option<u32> {
        self.index.get(token).copied()
    }

    pub fn count(&self, token: &str) -> Option<u64> {
        self.idx(token).map(|i| self.words[i as usize].count)
    }

    pub fn word(&self, idx: u32) -> &VocabWord {
        &self.words[idx as usize]
    }

    pub fn words(&self) -> &[VocabWord] {
        &self.words
    }

    pub fn min_count(&self) -> u64 {
        self.min_count
    }

    /// Token occurrences seen while counting, before frequency filtering.
    pub fn total_tokens(&self) -> u64 {
        self.total_tokens
    }

    /// Occurrences retained after filtering (drives the learning-rate
    /// schedule).
    pub fn retained_tokens(&self) -> u64 {
        self.words.iter().map(|w| w.count).sum()
    }
}

/// Training hyperparameters. Defaults are desk-scale versions of the
/// method's published settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub dim: usize,
    pub window: usize,
    pub negatives: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub n_min: usize,
    pub n_max: usize,
    pub buckets: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            dim: 100,
            window: 5,
            negatives: 5,
            epochs: 5,
            learning_rate: 0.05,
            n_min: 3,
            n_max: 6,
            buckets: 1 << 21,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::config("embedding dim must be positive"));
        }
        if self.window == 0 {
            return Err(Error::config("context window must be positive"));
        }
        if self.epochs == 0 {
            return Err(Error::config("epochs must be positive"));
        }
        if self.negatives == 0 {
            return Err(Error::config("negative sample count must be positive"));
        }
        if self.buckets == 0 {
            return Err(Error::config("subword bucket count must be positive"));
        }
        if self.n_min == 0 || self.n_min > self.n_max {
            return Err(Error::config(format!(
                "bad n-gram range [{}, {}]",
                self.n_min, self.n_max
            )));
        }
        if !self.learning_rate.is_finite() || self.learning_rate <= 0.0 {
            return Err(Error::config("learning rate must be positive and finite"));
        }
        Ok(())
    }
}

/// A trained embedding space: word vectors for the vocabulary plus the
/// shared subword bucket table.
#[derive(Debug, Clone)]
pub struct EmbeddingModel {
    config: TrainConfig,
    seed: u64,
    vocab: Vocabulary,
    word_vecs: Vec<f32>,
    subword_vecs: Vec<f32>,
    /// Cached bucket ids per vocabulary word.
    subword_ids: Vec<Vec<u32>>,
}

impl EmbeddingModel {
    pub(crate) fn new(
        config: TrainConfig,
        seed: u64,
        vocab: Vocabulary,
        word_vecs: Vec<f32>,
        subword_vecs: Vec<f32>,
    ) -> Self {
        assert_eq!(word_vecs.len(), vocab.len() * config.dim);
        assert_eq!(subword_vecs.len(), config.buckets * config.dim);
        let subword_ids = vocab
            .words()
            .iter()
            .map(|w| ngram_buckets(&w.token, config.n_min, config.n_max, config.buckets))
            .collect();
        EmbeddingModel {
            config,
            seed,
            vocab,
            word_vecs,
            subword_vecs,
            subword_ids,
        }
    }

    pub fn config(&self) -> &TrainConfig {
        &self.config
    }

    pub fn dim(&self) -> usize {
        self.config.dim
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub(crate) fn word_vecs(&self) -> &[f32] {
        &self.word_vecs
    }

    pub(crate) fn subword_vecs(&self) -> &[f32] {
        &self.subword_vecs
    }

    fn add_subwords(&self, ids: &[u32], out: &mut [f64]) {
        let dim = self.config.dim;
        for id in ids {
            let row = &self.subword_vecs[*id as usize * dim..(*id as usize + 1) * dim];
            for (o, v) in out.iter_mut().zip(row) {
                *o += *v as f64;
            }
        }
    }

    /// Representation of a word: word vector plus subword sum when in
    /// vocabulary, subword sum alone otherwise. Any non-empty token has
    /// at least one n-gram, so this never fails except on empty input.
    pub fn vector(&self, word: &str) -> Result<Vec<f64>> {
        if word.is_empty() {
            return Err(Error::domain("cannot embed an empty token"));
        }
        let dim = self.config.dim;
        let mut out = vec![0.0f64; dim];
        match self.vocab.idx(word) {
            Some(idx) => {
                let row = &self.word_vecs[idx as usize * dim..(idx as usize + 1) * dim];
                for (o, v) in out.iter_mut().zip(row) {
                    *o = *v as f64;
                }
                self.add_subwords(&self.subword_ids[idx as usize], &mut out);
            }
            None => {
                let ids =
                    ngram_buckets(word, self.config.n_min, self.config.n_max, self.config.buckets);
                self.add_subwords(&ids, &mut out);
            }
        }
        Ok(out)
    }

    /// Subword-only composition of a token, whether or not it is in
    /// vocabulary.
    pub fn subword_vector(&self, word: &str) -> Result<Vec<f64>> {
        if word.is_empty() {
            return Err(Error::domain("cannot embed an empty token"));
        }
        let ids = ngram_buckets(word, self.config.n_min, self.config.n_max, self.config.buckets);
        let mut out = vec![0.0f64; self.config.dim];
        self.add_subwords(&ids, &mut out);
        Ok(out)
    }

    /// Composed vector of vocabulary entry `idx`.
    pub fn vector_by_idx(&self, idx: u32) -> Vec<f64> {
        let dim = self.config.dim;
        let mut out = vec![0.0f64; dim];
        let row = &self.word_vecs[idx as usize * dim..(idx as usize + 1) * dim];
        for (o, v) in out.iter_mut().zip(row) {
            *o = *v as f64;
        }
        self.add_subwords(&self.subword_ids[idx as usize], &mut out);
        out
    }

    /// Largest composed-vector norm over the vocabulary.
    pub fn max_vector_norm(&self) -> f64 {
        (0..self.vocab.len() as u32)
            .map(|i| {
                let v = self.vector_by_idx(i);
                v.iter().map(|x| x * x).sum::<f64>().sqrt()
            })
            .fold(0.0, f64::max)
    }
}

/// Cosine similarity of two equal-length vectors; 0 when either is zero.
pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let mut dot = 0.0;
    let mut na = 0.0;
    let mut nb = 0.0;
    for (x, y) in a.iter().zip(b) {
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na.sqrt() * nb.sqrt())
    }
}

/// Scale a vector to unit length in place; zero vectors stay zero.
pub fn normalize(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        for x in v {
            *x /= norm;
        }
    }
}
