//! The sentiment rule engine.
//!
//! Token valences come from the lexicon; the rules adjust them for
//! degree modifiers (with distance decay 1.0 / 0.95 / 0.9 over the three
//! preceding words), negation within a three-token window, ALL-CAPS
//! emphasis in mixed-case text, and a "but" clause that halves everything
//! before it and amplifies everything after. Exclamation and question
//! marks add document-level emphasis. The compound score is the summed
//! adjusted valence normalized by s / sqrt(s^2 + 15).

use super::rules::*;
use super::{SentimentLexicon, SentimentScore};

/// Split into scoring tokens: whitespace-separated words with edge
/// punctuation stripped, except that words of two characters or fewer
/// keep their punctuation (preserves emoticons).
fn scoring_tokens(text: &str) -> Vec<&str> {
    text.split_whitespace()
        .map(|raw| {
            let stripped = raw.trim_matches(|c: char| c.is_ascii_punctuation());
            if stripped.chars().count() <= 2 {
                raw
            } else {
                stripped
            }
        })
        .collect()
}

/// Python-style `isupper`: at least one cased character, all of them
/// uppercase.
fn is_all_caps(word: &str) -> bool {
    let mut has_cased = false;
    for c in word.chars() {
        if c.is_lowercase() {
            return false;
        }
        if c.is_uppercase() {
            has_cased = true;
        }
    }
    has_cased
}

/// Emphasis only counts when the text mixes cased styles: some words
/// ALL-CAPS, some not.
fn has_caps_contrast(words: &[&str]) -> bool {
    let caps = words.iter().filter(|w| is_all_caps(w)).count();
    caps > 0 && caps < words.len()
}

/// Degree-modifier contribution of `word` to a sentiment hit with the
/// given valence sign.
fn booster_scalar(word: &str, valence: f64, caps_contrast: bool, lexicon: &SentimentLexicon) -> f64 {
    let lower = word.to_lowercase();
    let Some(mut scalar) = lexicon.booster(&lower) else {
        return 0.0;
    };
    if valence < 0.0 {
        scalar = -scalar;
    }
    if is_all_caps(word) && caps_contrast {
        if valence > 0.0 {
            scalar += CAPS_INCR;
        } else {
            scalar -= CAPS_INCR;
        }
    }
    scalar
}

/// Negation window at distance `dist + 1` before position `i`, with the
/// "never so/this" intensifier and "without doubt" exception.
fn apply_negation(
    valence: f64,
    lower_words: &[String],
    dist: usize,
    i: usize,
    lexicon: &SentimentLexicon,
) -> f64 {
    let negated = |w: &String| lexicon.is_negation(w);
    match dist {
        0 => {
            if negated(&lower_words[i - 1]) {
                return valence * NEGATION_SCALAR;
            }
        }
        1 => {
            let w2 = &lower_words[i - 2];
            let w1 = &lower_words[i - 1];
            if w2 == "never" && (w1 == "so" || w1 == "this") {
                return valence * 1.25;
            } else if w2 == "without" && w1 == "doubt" {
                return valence;
            } else if negated(w2) {
                return valence * NEGATION_SCALAR;
            }
        }
        2 => {
            let w3 = &lower_words[i - 3];
            let w2 = &lower_words[i - 2];
            let w1 = &lower_words[i - 1];
            if w3 == "never" && (w2 == "so" || w2 == "this" || w1 == "so" || w1 == "this") {
                return valence * 1.25;
            } else if w3 == "without" && (w2 == "doubt" || w1 == "doubt") {
                return valence;
            } else if negated(w3) {
                return valence * NEGATION_SCALAR;
            }
        }
        _ => {}
    }
    valence
}

/// "least" immediately before a sentiment word negates it, except in the
/// fixed phrases "at least" and "very least".
fn apply_least(valence: f64, lower_words: &[String], i: usize, lexicon: &SentimentLexicon) -> f64 {
    if i > 1 && !lexicon.contains(&lower_words[i - 1]) && lower_words[i - 1] == "least" {
        if lower_words[i - 2] != "at" && lower_words[i - 2] != "very" {
            return valence * NEGATION_SCALAR;
        }
    } else if i > 0 && !lexicon.contains(&lower_words[i - 1]) && lower_words[i - 1] == "least" {
        return valence * NEGATION_SCALAR;
    }
    valence
}

/// Adjusted valence of the word at position `i`, or 0 when not in the
/// lexicon.
fn word_valence(
    words: &[&str],
    lower_words: &[String],
    i: usize,
    caps_contrast: bool,
    lexicon: &SentimentLexicon,
) -> f64 {
    let lower = &lower_words[i];
    let Some(base) = lexicon.valence(lower) else {
        return 0.0;
    };
    let mut valence = base;

    // "no" standing before a lexicon word acts as a negator, not a hit.
    if lower == "no" && i + 1 < words.len() && lexicon.contains(&lower_words[i + 1]) {
        valence = 0.0;
    }
    if (i >= 1 && lower_words[i - 1] == "no")
        || (i >= 2 && lower_words[i - 2] == "no")
        || (i >= 3
            && lower_words[i - 3] == "no"
            && (lower_words[i - 1] == "or" || lower_words[i - 1] == "nor"))
    {
        valence = base * NEGATION_SCALAR;
    }

    if is_all_caps(words[i]) && caps_contrast {
        if valence > 0.0 {
            valence += CAPS_INCR;
        } else {
            valence -= CAPS_INCR;
        }
    }

    for dist in 0..3usize {
        if i > dist && !lexicon.contains(&lower_words[i - (dist + 1)]) {
            let mut scalar = booster_scalar(words[i - (dist + 1)], valence, caps_contrast, lexicon);
            if dist == 1 && scalar != 0.0 {
                scalar *= 0.95;
            }
            if dist == 2 && scalar != 0.0 {
                scalar *= 0.9;
            }
            valence += scalar;
            valence = apply_negation(valence, lower_words, dist, i, lexicon);
        }
    }

    apply_least(valence, lower_words, i, lexicon)
}

/// Halve contributions before the first "but", amplify those after it.
fn apply_but_clause(lower_words: &[String], valences: &mut [f64]) {
    if let Some(but_idx) = lower_words.iter().position(|w| w == "but") {
        for (i, v) in valences.iter_mut().enumerate() {
            if i < but_idx {
                *v *= 0.5;
            } else if i > but_idx {
                *v *= 1.5;
            }
        }
    }
}

fn punctuation_emphasis(text: &str) -> f64 {
    let ep = (text.matches('!').count().min(4)) as f64 * EXCLAIM_INCR;
    let qm_count = text.matches('?').count();
    let qm = if qm_count > 1 {
        if qm_count <= 3 {
            qm_count as f64 * QMARK_INCR
        } else {
            QMARK_CAP
        }
    } else {
        0.0
    };
    ep + qm
}

fn normalize_compound(s: f64) -> f64 {
    (s / (s * s + NORMALIZE_ALPHA).sqrt()).clamp(-1.0, 1.0)
}

/// Score a text. Empty or whitespace-only text scores all zeros.
pub fn score_text(text: &str, lexicon: &SentimentLexicon) -> SentimentScore {
    let words = scoring_tokens(text);
    if words.is_empty() {
        return SentimentScore::ZERO;
    }
    let lower_words: Vec<String> = words.iter().map(|w| w.to_lowercase()).collect();
    let caps_contrast = has_caps_contrast(&words);

    let mut valences = Vec::with_capacity(words.len());
    for i in 0..words.len() {
        let lower = &lower_words[i];
        // Degree modifiers and the "kind of" bigram contribute emphasis
        // to neighbours, never valence of their own.
        if lexicon.booster(lower).is_some()
            || (lower == "kind" && lower_words.get(i + 1).map(String::as_str) == Some("of"))
        {
            valences.push(0.0);
        } else {
            valences.push(word_valence(&words, &lower_words, i, caps_contrast, lexicon));
        }
    }
    apply_but_clause(&lower_words, &mut valences);

    let punct_emph = punctuation_emphasis(text);
    let mut sum: f64 = valences.iter().sum();
    if sum > 0.0 {
        sum += punct_emph;
    } else if sum < 0.0 {
        sum -= punct_emph;
    }
    let compound = normalize_compound(sum);

    let mut pos_sum = 0.0f64;
    let mut neg_sum = 0.0f64;
    let mut neu_count = 0.0f64;
    for v in &valences {
        if *v > 0.0 {
            pos_sum += v + 1.0;
        } else if *v < 0.0 {
            neg_sum += v - 1.0;
        } else {
            neu_count += 1.0;
        }
    }
    if pos_sum > neg_sum.abs() {
        pos_sum += punct_emph;
    } else if pos_sum < neg_sum.abs() {
        neg_sum -= punct_emph;
    }
    let total = pos_sum + neg_sum.abs() + neu_count;
    SentimentScore {
        positive: (pos_sum / total).abs(),
        negative: (neg_sum / total).abs(),
        neutral: (neu_count / total).abs(),
        compound,
    }
}
