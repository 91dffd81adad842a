//! Offensive-speech scores: ingestion of externally produced 3-class
//! classifier records, and a lexicon baseline for runs without them.

use std::collections::{BTreeMap, HashSet};
use std::io::BufRead;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::{CorpusStore, Document};
use crate::{Error, Result};

/// Number of leading tokens an external classifier saw per article; the
/// baseline honours the same truncation.
pub const SCORE_TRUNCATION: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LabelScores {
    pub hate: f64,
    pub offensive: f64,
    pub normal: f64,
}

/// One line of the external score file: the 3-class output of an
/// offensive-speech classifier for one document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExternalScoreRecord {
    pub doc_id: String,
    pub label: String,
    pub scores: LabelScores,
    pub truncation: u32,
}

impl ExternalScoreRecord {
    /// Records must carry one of the three known labels, scores summing
    /// to 1 within 1e-4, and a label equal to the argmax score.
    fn validate(&self) -> std::result::Result<(), String> {
        if !["hate", "offensive", "normal"].contains(&self.label.as_str()) {
            return Err(format!("unknown label {:?}", self.label));
        }
        let s = self.scores;
        let sum = s.hate + s.offensive + s.normal;
        if (sum - 1.0).abs() > 1e-4 {
            return Err(format!("label scores sum to {sum}, not 1"));
        }
        let max = s.hate.max(s.offensive).max(s.normal);
        let label_score = match self.label.as_str() {
            "hate" => s.hate,
            "offensive" => s.offensive,
            _ => s.normal,
        };
        if label_score < max {
            return Err(format!("label {:?} is not the argmax score", self.label));
        }
        Ok(())
    }
}

/// Result of joining an external score file against a corpus store.
#[derive(Debug, Clone, Default)]
pub struct ScoreIngest {
    /// Valid records matched to stored documents, keyed by document id.
    pub joined: BTreeMap<String, ExternalScoreRecord>,
    pub malformed: u64,
    pub unmatched: u64,
}

impl ScoreIngest {
    /// Per-document offensive-speech score: the probability of the
    /// `offensive` class.
    pub fn offensive_scores(&self) -> BTreeMap<String, f64> {
        self.joined
            .iter()
            .map(|(id, r)| (id.clone(), r.scores.offensive))
            .collect()
    }
}

/// Read line-delimited external score records and join them to stored
/// documents by id. Malformed lines are counted and skipped; ids that
/// match no stored document are counted. When more than half of the
/// valid records are unmatched the file very likely belongs to a
/// different corpus and the ingest fails.
pub fn ingest_scores(path: &Path, store: &CorpusStore) -> Result<ScoreIngest> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = ScoreIngest::default();
    let mut valid = 0u64;
    for line in std::io::BufReader::new(file).lines() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let record: ExternalScoreRecord = match serde_json::from_str(&line) {
            Ok(r) => r,
            Err(_) => {
                out.malformed += 1;
                continue;
            }
        };
        if record.validate().is_err() {
            out.malformed += 1;
            continue;
        }
        valid += 1;
        if store.get(&record.doc_id).is_none() {
            out.unmatched += 1;
            continue;
        }
        out.joined.insert(record.doc_id.clone(), record);
    }
    if valid > 0 && out.unmatched * 2 > valid {
        return Err(Error::domain(format!(
            "{} of {valid} score records match no stored document; wrong corpus?",
            out.unmatched
        )));
    }
    Ok(out)
}

/// Offensive-term list, one lowercase term per line, '#' comments.
#[derive(Debug, Clone, Default)]
pub struct OffensiveLexicon {
    terms: HashSet<String>,
}

impl OffensiveLexicon {
    pub fn new(terms: impl IntoIterator<Item = String>) -> Self {
        OffensiveLexicon {
            terms: terms.into_iter().map(|t| t.to_lowercase()).collect(),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(Self::new(
            text.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(str::to_string),
        ))
    }

    pub fn contains(&self, token: &str) -> bool {
        self.terms.contains(token)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Lexicon fallback score: matched-term token mass over the first 512
/// tokens, divided by min(total tokens, 512).
pub fn offensive_baseline(doc: &Document, lexicon: &OffensiveLexicon) -> f64 {
    let tokens = doc.tokens();
    if tokens.is_empty() {
        return 0.0;
    }
    let window = tokens.len().min(SCORE_TRUNCATION);
    let matched = tokens[..window]
        .iter()
        .filter(|t| lexicon.contains(t))
        .count();
    matched as f64 / window as f64
}
