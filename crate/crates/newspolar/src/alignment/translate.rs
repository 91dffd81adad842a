//! Word translation across aligned spaces and misaligned-pair mining.

use rayon::prelude::*;

use super::{AlignmentTransform, MisalignmentReport, TranslationPair};
use crate::corpus::{split_sentences, tokenize, Document};
use crate::embeddings::{cosine, normalize, EmbeddingModel};
use crate::{Error, Result};

/// Retrieval rule for picking the translation among target candidates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TranslationMethod {
    /// Highest cosine to the aligned source vector.
    NearestNeighbor,
    /// Softmax over aligned *source* queries per target, which demotes
    /// hub targets that are near everything.
    InvertedSoftmax { temperature: f64 },
}

/// Unit-normalized composed vectors of a model's vocabulary, the search
/// structure behind translation.
pub struct TargetSpace {
    matrix: Vec<f64>,
    dim: usize,
    len: usize,
}

impl TargetSpace {
    pub fn new(model: &EmbeddingModel) -> Self {
        let dim = model.dim();
        let len = model.vocab().len();
        let mut matrix = vec![0.0f64; len * dim];
        for idx in 0..len {
            let mut v = model.vector_by_idx(idx as u32);
            normalize(&mut v);
            matrix[idx * dim..(idx + 1) * dim].copy_from_slice(&v);
        }
        TargetSpace { matrix, dim, len }
    }

    fn row(&self, idx: usize) -> &[f64] {
        &self.matrix[idx * self.dim..(idx + 1) * self.dim]
    }

    fn cosines(&self, query_unit: &[f64]) -> Vec<f64> {
        (0..self.len)
            .map(|idx| {
                self.row(idx)
                    .iter()
                    .zip(query_unit)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }
}

/// Aligned unit vector of a source word: vector(model, word) . Q,
/// unit-normalized.
fn aligned_source_unit(
    model_source: &EmbeddingModel,
    transform: &AlignmentTransform,
    idx: u32,
) -> Vec<f64> {
    let mut v = transform.apply(&model_source.vector_by_idx(idx));
    normalize(&mut v);
    v
}

/// Per-target denominators of the inverted softmax: sum over all aligned
/// source queries of exp(temperature * cosine).
fn inverted_softmax_denominators(
    model_source: &EmbeddingModel,
    targets: &TargetSpace,
    transform: &AlignmentTransform,
    temperature: f64,
) -> Vec<f64> {
    // Fixed chunking plus an ordered sequential fold keeps the float
    // summation order independent of worker count.
    let n_sources = model_source.vocab().len();
    let source_ids: Vec<usize> = (0..n_sources).collect();
    let chunk_sums: Vec<Vec<f64>> = source_ids
        .par_chunks(256)
        .map(|chunk| {
            let mut acc = vec![0.0f64; targets.len];
            for s in chunk {
                let query = aligned_source_unit(model_source, transform, *s as u32);
                for (a, c) in acc.iter_mut().zip(targets.cosines(&query)) {
                    *a += (temperature * c).exp();
                }
            }
            acc
        })
        .collect();
    let mut denominators = vec![0.0f64; targets.len];
    for chunk in chunk_sums {
        for (d, c) in denominators.iter_mut().zip(chunk) {
            *d += c;
        }
    }
    denominators
}

/// Pick the best target index for the given per-target scores; ties go
/// to the higher-frequency target, then the lexicographically smaller
/// token.
fn argmax_with_tiebreak(scores: &[f64], model_target: &EmbeddingModel) -> (usize, f64) {
    let vocab = model_target.vocab();
    let mut best = 0usize;
    for idx in 1..scores.len() {
        let better = match scores[idx].partial_cmp(&scores[best]) {
            Some(std::cmp::Ordering::Greater) => true,
            Some(std::cmp::Ordering::Equal) => {
                let (b, c) = (vocab.word(best as u32), vocab.word(idx as u32));
                c.count > b.count || (c.count == b.count && c.token < b.token)
            }
            _ => false,
        };
        if better {
            best = idx;
        }
    }
    (best, scores[best])
}

fn translate_idx(
    source_idx: u32,
    model_source: &EmbeddingModel,
    model_target: &EmbeddingModel,
    targets: &TargetSpace,
    transform: &AlignmentTransform,
    method: TranslationMethod,
    denominators: Option<&[f64]>,
) -> TranslationPair {
    let query = aligned_source_unit(model_source, transform, source_idx);
    let cosines = targets.cosines(&query);
    let (best, _) = match method {
        TranslationMethod::NearestNeighbor => argmax_with_tiebreak(&cosines, model_target),
        TranslationMethod::InvertedSoftmax { temperature } => {
            let denoms = denominators.expect("denominators precomputed for inverted softmax");
            let scores: Vec<f64> = cosines
                .iter()
                .zip(denoms)
                .map(|(c, z)| (temperature * c).exp() / z.max(f64::MIN_POSITIVE))
                .collect();
            argmax_with_tiebreak(&scores, model_target)
        }
    };
    let source_word = model_source.vocab().word(source_idx);
    TranslationPair {
        source: source_word.token.clone(),
        target: model_target.vocab().word(best as u32).token.clone(),
        source_frequency: source_word.count,
        aligned_cosine: cosines[best],
        rank: 0,
    }
}

/// Translate one source-vocabulary word into the target space.
pub fn translate(
    word: &str,
    model_source: &EmbeddingModel,
    model_target: &EmbeddingModel,
    transform: &AlignmentTransform,
    method: TranslationMethod,
) -> Result<TranslationPair> {
    let Some(idx) = model_source.vocab().idx(word) else {
        return Err(Error::domain(format!(
            "word {word:?} is not in the source vocabulary"
        )));
    };
    let targets = TargetSpace::new(model_target);
    let denominators = match method {
        TranslationMethod::InvertedSoftmax { temperature } => Some(
            inverted_softmax_denominators(model_source, &targets, transform, temperature),
        ),
        TranslationMethod::NearestNeighbor => None,
    };
    Ok(translate_idx(
        idx,
        model_source,
        model_target,
        &targets,
        transform,
        method,
        denominators.as_deref(),
    ))
}

/// Translate every source-vocabulary word, keep the pairs whose target
/// differs from the source, rank them by source frequency descending
/// (then source token), and truncate to `top_k`.
pub fn mine_misaligned(
    model_source: &EmbeddingModel,
    model_target: &EmbeddingModel,
    transform: &AlignmentTransform,
    method: TranslationMethod,
    top_k: usize,
) -> Result<MisalignmentReport> {
    if top_k == 0 {
        return Err(Error::config("misalignment report size must be positive"));
    }
    let targets = TargetSpace::new(model_target);
    let denominators = match method {
        TranslationMethod::InvertedSoftmax { temperature } => Some(
            inverted_softmax_denominators(model_source, &targets, transform, temperature),
        ),
        TranslationMethod::NearestNeighbor => None,
    };
    let examined = model_source.vocab().len();
    let mut pairs: Vec<TranslationPair> = (0..examined as u32)
        .into_par_iter()
        .map(|idx| {
            translate_idx(
                idx,
                model_source,
                model_target,
                &targets,
                transform,
                method,
                denominators.as_deref(),
            )
        })
        .filter(|p| p.source != p.target)
        .collect();
    pairs.sort_unstable_by(|a, b| {
        b.source_frequency
            .cmp(&a.source_frequency)
            .then_with(|| a.source.cmp(&b.source))
    });
    pairs.truncate(top_k);
    for (i, p) in pairs.iter_mut().enumerate() {
        p.rank = i + 1;
    }
    Ok(MisalignmentReport {
        pairs,
        ranking_key: "source_frequency".to_string(),
        top_k,
        examined_words: examined,
    })
}

/// A cross-corpus sentence pair illustrating one mined word pair.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ContextPair {
    pub source_sentence: String,
    pub target_sentence: String,
    pub similarity: f64,
}

const MAX_CONTEXT_TOKENS: usize = 60;

/// Candidate sentences of one partition that contain `token`, with their
/// mean-of-unit-word-vector embeddings. Source-side embeddings are
/// mapped through the transform so both sides live in the target space.
fn candidate_sentences(
    docs: &[&Document],
    token: &str,
    model: &EmbeddingModel,
    transform: Option<&AlignmentTransform>,
) -> Vec<(String, Vec<f64>)> {
    let dim = model.dim();
    let mut out = Vec::new();
    for doc in docs {
        for sentence in split_sentences(&format!("{}. {}", doc.title, doc.body)) {
            let tokens = tokenize(&sentence);
            if tokens.len() > MAX_CONTEXT_TOKENS {
                continue;
            }
            if !tokens.iter().any(|t| t == token) {
                continue;
            }
            let mut sum = vec![0.0f64; dim];
            let mut used = 0usize;
            for t in &tokens {
                if let Some(idx) = model.vocab().idx(t) {
                    let mut v = model.vector_by_idx(idx);
                    normalize(&mut v);
                    for (s, x) in sum.iter_mut().zip(&v) {
                        *s += x;
                    }
                    used += 1;
                }
            }
            if used == 0 {
                continue;
            }
            for s in sum.iter_mut() {
                *s /= used as f64;
            }
            let embedded = match transform {
                Some(t) => t.apply(&sum),
                None => sum,
            };
            out.push((sentence, embedded));
        }
    }
    out
}

/// Find the `top_m` most similar cross-corpus sentence pairs where the
/// source sentence contains the pair's source token and the target
/// sentence its target token. Returns an empty list (with a warning)
/// when either side has no candidates.
#[allow(clippy::too_many_arguments)]
pub fn find_illustrative_contexts(
    pair: &TranslationPair,
    docs_source: &[&Document],
    docs_target: &[&Document],
    model_source: &EmbeddingModel,
    model_target: &EmbeddingModel,
    transform: &AlignmentTransform,
    top_m: usize,
) -> (Vec<ContextPair>, Vec<String>) {
    let mut warnings = Vec::new();
    let source_candidates =
        candidate_sentences(docs_source, &pair.source, model_source, Some(transform));
    let target_candidates = candidate_sentences(docs_target, &pair.target, model_target, None);
    if source_candidates.is_empty() {
        warnings.push(format!(
            "no source sentences contain {:?}; no contexts",
            pair.source
        ));
        return (Vec::new(), warnings);
    }
    if target_candidates.is_empty() {
        warnings.push(format!(
            "no target sentences contain {:?}; no contexts",
            pair.target
        ));
        return (Vec::new(), warnings);
    }

    let mut scored: Vec<(usize, usize, f64)> = Vec::new();
    for (i, (_, sv)) in source_candidates.iter().enumerate() {
        for (j, (_, tv)) in target_candidates.iter().enumerate() {
            scored.push((i, j, cosine(sv, tv)));
        }
    }
    scored.sort_by(|a, b| {
        b.2.partial_cmp(&a.2)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| (a.0, a.1).cmp(&(b.0, b.1)))
    });
    scored.truncate(top_m);
    (
        scored
            .into_iter()
            .map(|(i, j, similarity)| ContextPair {
                source_sentence: source_candidates[i].0.clone(),
                target_sentence: target_candidates[j].0.clone(),
                similarity,
            })
            .collect(),
        warnings,
    )
}
