//! Lexicon and rule-based sentiment scoring in the style of VADER
//! (Hutto & Gilbert), with the class thresholds at ±0.05 on the
//! compound score.

mod rules;
mod scorer;

pub use scorer::score_text;

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::Document;
use crate::{Error, Result};

/// Token valences plus the built-in rule vocabularies (degree modifiers
/// and negators) the scorer consults.
#[derive(Debug, Clone)]
pub struct SentimentLexicon {
    entries: HashMap<String, f64>,
    boosters: HashMap<&'static str, f64>,
    negations: Vec<&'static str>,
}

/// Counters from a lexicon load.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LexiconReport {
    pub loaded: u64,
    pub skipped: u64,
    pub warnings: Vec<String>,
}

impl SentimentLexicon {
    /// Build a lexicon from explicit valence entries, using the built-in
    /// booster and negation vocabularies.
    pub fn new(entries: impl IntoIterator<Item = (String, f64)>) -> Self {
        SentimentLexicon {
            entries: entries.into_iter().collect(),
            boosters: rules::booster_map(),
            negations: rules::NEGATIONS.to_vec(),
        }
    }

    /// Load tab-separated `token<TAB>valence` lines. Lines starting with
    /// '#' are comments. Malformed lines (wrong field count, unparseable
    /// or non-finite valence, duplicate token) are counted and skipped.
    pub fn load(path: &Path) -> Result<(Self, LexiconReport)> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut report = LexiconReport::default();
        let mut entries = HashMap::new();
        for line in text.lines() {
            let line = line.trim_end();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split('\t');
            let token = fields.next().unwrap_or_default().trim();
            let valence = fields.next().and_then(|v| v.trim().parse::<f64>().ok());
            match valence {
                Some(v) if !token.is_empty() && v.is_finite() => {
                    if entries.contains_key(token) {
                        report.skipped += 1;
                    } else {
                        entries.insert(token.to_string(), v);
                        report.loaded += 1;
                    }
                }
                _ => report.skipped += 1,
            }
        }
        if entries.is_empty() {
            report
                .warnings
                .push(format!("lexicon {} has no usable entries", path.display()));
        }
        Ok((Self::new(entries), report))
    }

    pub fn valence(&self, token_lower: &str) -> Option<f64> {
        self.entries.get(token_lower).copied()
    }

    pub fn contains(&self, token_lower: &str) -> bool {
        self.entries.contains_key(token_lower)
    }

    pub fn booster(&self, token_lower: &str) -> Option<f64> {
        self.boosters.get(token_lower).copied()
    }

    pub fn is_negation(&self, token_lower: &str) -> bool {
        self.negations.contains(&token_lower) || token_lower.contains("n't")
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Ratios of positive/neutral/negative token mass plus the normalized
/// compound score in [-1, 1].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SentimentScore {
    pub positive: f64,
    pub neutral: f64,
    pub negative: f64,
    pub compound: f64,
}

impl SentimentScore {
    pub const ZERO: SentimentScore = SentimentScore {
        positive: 0.0,
        neutral: 0.0,
        negative: 0.0,
        compound: 0.0,
    };

    pub fn class(&self) -> SentimentClass {
        classify(self.compound)
    }
}

/// Three-way sentiment class at the ±0.05 compound thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SentimentClass {
    Positive,
    Neutral,
    Negative,
}

impl SentimentClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            SentimentClass::Positive => "positive",
            SentimentClass::Neutral => "neutral",
            SentimentClass::Negative => "negative",
        }
    }
}

impl std::fmt::Display for SentimentClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Class boundaries are closed: compound of exactly 0.05 is positive and
/// exactly -0.05 is negative.
pub fn classify(compound: f64) -> SentimentClass {
    if compound >= 0.05 {
        SentimentClass::Positive
    } else if compound <= -0.05 {
        SentimentClass::Negative
    } else {
        SentimentClass::Neutral
    }
}

/// Score a document's title and body as one text.
pub fn score_document(doc: &Document, lexicon: &SentimentLexicon) -> SentimentScore {
    score_text(&format!("{} {}", doc.title, doc.body), lexicon)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn classify_thresholds_are_closed() {
        assert_eq!(classify(0.05), SentimentClass::Positive);
        assert_eq!(classify(-0.05), SentimentClass::Negative);
        assert_eq!(classify(0.0), SentimentClass::Neutral);
        assert_eq!(classify(0.049999), SentimentClass::Neutral);
        assert_eq!(classify(-0.049999), SentimentClass::Neutral);
    }

    fn write_lexicon(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn load_counts_valid_lines() {
        let f = write_lexicon("good\t1.9\nbad\t-2.5\n");
        let (lex, report) = SentimentLexicon::load(f.path()).unwrap();
        assert_eq!(lex.len(), 2);
        assert_eq!(report.loaded, 2);
        assert_eq!(report.skipped, 0);
        assert!(report.warnings.is_empty());
    }

    #[test]
    fn load_skips_malformed_lines() {
        let f = write_lexicon("good\t1.9\nbroken-line-no-tab\n");
        let (lex, report) = SentimentLexicon::load(f.path()).unwrap();
        assert_eq!(lex.len(), 1);
        assert_eq!(report.skipped, 1);
    }

    #[test]
    fn load_warns_on_empty_file() {
        let f = write_lexicon("# just a comment\n");
        let (lex, report) = SentimentLexicon::load(f.path()).unwrap();
        assert!(lex.is_empty());
        assert_eq!(report.warnings.len(), 1);
    }

    #[test]
    fn load_skips_duplicates_and_non_finite() {
        let f = write_lexicon("good\t1.9\ngood\t2.0\nweird\tinf\n");
        let (lex, report) = SentimentLexicon::load(f.path()).unwrap();
        assert_eq!(lex.len(), 1);
        assert_eq!(lex.valence("good"), Some(1.9));
        assert_eq!(report.skipped, 2);
    }

    #[test]
    fn missing_file_is_io_error() {
        assert!(SentimentLexicon::load(Path::new("/nonexistent/lexicon.tsv")).is_err());
    }
}
