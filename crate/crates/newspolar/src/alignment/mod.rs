//! Cross-corpus embedding alignment and word-translation mining.
//!
//! Two sub-corpora are treated as two languages: a seed lexicon of
//! identity pairs over shared frequent tokens fits an orthogonal
//! transform from the source space into the target space, every source
//! word is translated to its nearest target neighbour, and the pairs
//! whose translation is a different word are ranked by source frequency
//! for human review.

mod procrustes;
mod translate;

pub use procrustes::{fit_procrustes, random_orthogonal, random_unit_rows, MIN_SEED_PAIRS};
pub use translate::{
    find_illustrative_contexts, mine_misaligned, translate, ContextPair, TargetSpace,
    TranslationMethod,
};

use std::io::Write;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::embeddings::Vocabulary;
use crate::{Error, Result};

/// Word pairs assumed to translate to each other, used to fit the
/// transform. Here: identity pairs over tokens frequent in both corpora.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedLexicon {
    pub pairs: Vec<(String, String)>,
    pub strategy: String,
    pub top_n: usize,
    /// Smallest min(count_source, count_target) among the selected pairs.
    pub min_frequency: u64,
}

/// Identity seed pairs for the `top_n` tokens present in both
/// vocabularies, ranked by min(count in source, count in target)
/// descending, ties broken lexicographically.
pub fn build_seed_lexicon(
    vocab_source: &Vocabulary,
    vocab_target: &Vocabulary,
    top_n: usize,
) -> Result<SeedLexicon> {
    if top_n == 0 {
        return Err(Error::config("seed lexicon size must be positive"));
    }
    let mut shared: Vec<(u64, &str)> = vocab_source
        .words()
        .iter()
        .filter_map(|w| {
            vocab_target
                .count(&w.token)
                .map(|target_count| (w.count.min(target_count), w.token.as_str()))
        })
        .collect();
    if shared.len() < MIN_SEED_PAIRS {
        return Err(Error::domain(format!(
            "only {} shared tokens between the vocabularies; alignment is infeasible",
            shared.len()
        )));
    }
    shared.sort_unstable_by(|a, b| b.0.cmp(&a.0).then_with(|| a.1.cmp(b.1)));
    shared.truncate(top_n);
    let min_frequency = shared.iter().map(|(c, _)| *c).min().unwrap_or(0);
    Ok(SeedLexicon {
        pairs: shared
            .into_iter()
            .map(|(_, t)| (t.to_string(), t.to_string()))
            .collect(),
        strategy: "identity-shared-frequent".to_string(),
        top_n,
        min_frequency,
    })
}

impl SeedLexicon {
    /// Tab-separated `source<TAB>target` export.
    pub fn write_tsv(&self, path: &Path) -> Result<()> {
        let mut out = String::new();
        for (s, t) in &self.pairs {
            out.push_str(s);
            out.push('\t');
            out.push_str(t);
            out.push('\n');
        }
        std::fs::write(path, out).map_err(|e| Error::io(path, e))
    }

    pub fn read_tsv(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut pairs = Vec::new();
        for line in text.lines() {
            if line.trim().is_empty() {
                continue;
            }
            let (s, t) = line
                .split_once('\t')
                .ok_or_else(|| Error::domain(format!("bad seed lexicon line: {line:?}")))?;
            pairs.push((s.to_string(), t.to_string()));
        }
        let top_n = pairs.len();
        Ok(SeedLexicon {
            pairs,
            strategy: "imported".to_string(),
            top_n,
            min_frequency: 0,
        })
    }
}

/// Orthogonal map from the source embedding space into the target space,
/// applied to row vectors as v -> vQ.
#[derive(Debug, Clone)]
pub struct AlignmentTransform {
    pub q: DMatrix<f64>,
    pub seed_pairs: usize,
    pub mean_seed_cosine: f64,
}

impl AlignmentTransform {
    pub fn dim(&self) -> usize {
        self.q.nrows()
    }

    /// Map a source-space row vector into the target space.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let dim = self.dim();
        debug_assert_eq!(v.len(), dim);
        let mut out = vec![0.0; dim];
        for (i, vi) in v.iter().enumerate() {
            if *vi == 0.0 {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                *o += vi * self.q[(i, j)];
            }
        }
        out
    }

    /// Frobenius distance of Q^T Q from the identity.
    pub fn orthogonality_defect(&self) -> f64 {
        let dim = self.dim();
        let gram = self.q.transpose() * &self.q;
        let mut sum = 0.0;
        for i in 0..dim {
            for j in 0..dim {
                let target = if i == j { 1.0 } else { 0.0 };
                sum += (gram[(i, j)] - target).powi(2);
            }
        }
        sum.sqrt()
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        let wire = TransformWire {
            dim: self.dim(),
            rows: (0..self.dim())
                .map(|r| (0..self.dim()).map(|c| self.q[(r, c)]).collect())
                .collect(),
            seed_pairs: self.seed_pairs,
            mean_seed_cosine: self.mean_seed_cosine,
        };
        let json = serde_json::to_string(&wire)
            .map_err(|e| Error::domain(format!("serialize transform: {e}")))?;
        std::fs::write(path, json + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn read_json(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let wire: TransformWire = serde_json::from_str(&text)
            .map_err(|e| Error::domain(format!("bad transform file: {e}")))?;
        if wire.rows.len() != wire.dim || wire.rows.iter().any(|r| r.len() != wire.dim) {
            return Err(Error::domain("transform matrix shape mismatch"));
        }
        Ok(AlignmentTransform {
            q: DMatrix::from_fn(wire.dim, wire.dim, |r, c| wire.rows[r][c]),
            seed_pairs: wire.seed_pairs,
            mean_seed_cosine: wire.mean_seed_cosine,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct TransformWire {
    dim: usize,
    rows: Vec<Vec<f64>>,
    seed_pairs: usize,
    mean_seed_cosine: f64,
}

/// One translated word with the evidence a reviewer needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranslationPair {
    pub source: String,
    pub target: String,
    pub source_frequency: u64,
    pub aligned_cosine: f64,
    /// 1-based position in the mined report; 0 for ad-hoc translations.
    pub rank: usize,
}

/// Frequency-ranked pairs whose translation differs from the source.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MisalignmentReport {
    pub pairs: Vec<TranslationPair>,
    /// Which corpus supplied the frequency key.
    pub ranking_key: String,
    pub top_k: usize,
    pub examined_words: usize,
}

impl MisalignmentReport {
    /// `rank,source,target,source_count,aligned_cosine` rows.
    pub fn write_csv(&self, w: &mut impl Write) -> std::io::Result<()> {
        writeln!(w, "rank,source,target,source_count,aligned_cosine")?;
        for p in &self.pairs {
            writeln!(
                w,
                "{},{},{},{},{:.6}",
                p.rank, p.source, p.target, p.source_frequency, p.aligned_cosine
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embeddings::VocabWord;

    pub(crate) fn vocab(entries: &[(&str, u64)]) -> Vocabulary {
        let mut words: Vec<VocabWord> = entries
            .iter()
            .map(|(t, c)| VocabWord {
                token: t.to_string(),
                count: *c,
            })
            .collect();
        words.sort_unstable_by(|a, b| b.count.cmp(&a.count).then_with(|| a.token.cmp(&b.token)));
        let total = words.iter().map(|w| w.count).sum();
        Vocabulary::from_parts(words, 1, total)
    }

    #[test]
    fn seed_lexicon_ranks_by_min_count() {
        // Shared tokens x (min 10) and y (min 50) plus filler to clear
        // the shared-token floor.
        let mut a_entries = vec![("x", 100u64), ("y", 50), ("z", 1)];
        let mut b_entries = vec![("x", 10u64), ("y", 200), ("q", 5)];
        for i in 0..10 {
            let leaked: &'static str = Box::leak(format!("shared{i}").into_boxed_str());
            a_entries.push((leaked, 2));
            b_entries.push((leaked, 2));
        }
        let a = vocab(&a_entries);
        let b = vocab(&b_entries);
        let seeds = build_seed_lexicon(&a, &b, 2).unwrap();
        assert_eq!(
            seeds.pairs,
            vec![
                ("y".to_string(), "y".to_string()),
                ("x".to_string(), "x".to_string())
            ]
        );
        assert_eq!(seeds.min_frequency, 10);
    }

    #[test]
    fn disjoint_vocabularies_fail() {
        let a = vocab(&[("only-a", 5)]);
        let b = vocab(&[("only-b", 5)]);
        assert!(build_seed_lexicon(&a, &b, 10).is_err());
    }

    #[test]
    fn identical_vocabularies_give_identity_pairs() {
        let entries: Vec<(&str, u64)> = (0..15)
            .map(|i| {
                let leaked: &'static str = Box::leak(format!("tok{i:02}").into_boxed_str());
                (leaked, (20 - i) as u64)
            })
            .collect();
        let a = vocab(&entries);
        let seeds = build_seed_lexicon(&a, &a, 3).unwrap();
        assert_eq!(seeds.pairs.len(), 3);
        assert!(seeds.pairs.iter().all(|(s, t)| s == t));
        assert_eq!(seeds.pairs[0].0, "tok00");
    }

    #[test]
    fn seed_lexicon_tsv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("seeds.tsv");
        let lex = SeedLexicon {
            pairs: vec![("a".into(), "a".into()), ("b".into(), "c".into())],
            strategy: "test".into(),
            top_n: 2,
            min_frequency: 4,
        };
        lex.write_tsv(&path).unwrap();
        let loaded = SeedLexicon::read_tsv(&path).unwrap();
        assert_eq!(loaded.pairs, lex.pairs);
    }

    #[test]
    fn transform_json_round_trip() {
        let x = random_unit_rows(20, 6, 21);
        let y = random_unit_rows(20, 6, 22);
        let (t, _) = fit_procrustes(&x, &y).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("transform.json");
        t.write_json(&path).unwrap();
        let loaded = AlignmentTransform::read_json(&path).unwrap();
        assert_eq!(loaded.q, t.q);
        assert_eq!(loaded.seed_pairs, t.seed_pairs);
    }
}
