//! Rule constants of the lexicon-and-rule sentiment method: degree
//! modifiers, negators, and the emphasis scalars.

use std::collections::HashMap;

/// Valence bump for an intensifying degree modifier.
pub const BOOSTER_INCR: f64 = 0.293;
/// Valence bump for a dampening degree modifier.
pub const BOOSTER_DECR: f64 = -0.293;
/// Emphasis added for an ALL-CAPS sentiment word in mixed-case text.
pub const CAPS_INCR: f64 = 0.733;
/// Multiplier applied when a sentiment word is negated.
pub const NEGATION_SCALAR: f64 = -0.74;
/// Normalization constant of the compound score: s / sqrt(s^2 + ALPHA).
pub const NORMALIZE_ALPHA: f64 = 15.0;
/// Each '!' adds this much emphasis, up to four.
pub const EXCLAIM_INCR: f64 = 0.292;
/// Each '?' beyond the first adds this much, up to three; more cap at
/// `QMARK_CAP`.
pub const QMARK_INCR: f64 = 0.18;
pub const QMARK_CAP: f64 = 0.96;

/// Words that flip the polarity of a following sentiment word.
pub const NEGATIONS: &[&str] = &[
    "aint", "arent", "cannot", "cant", "couldnt", "darent", "didnt", "doesnt", "ain't", "aren't",
    "can't", "couldn't", "daren't", "didn't", "doesn't", "dont", "hadnt", "hasnt", "havent",
    "isnt", "mightnt", "mustnt", "neither", "don't", "hadn't", "hasn't", "haven't", "isn't",
    "mightn't", "mustn't", "neednt", "needn't", "never", "none", "nope", "nor", "not", "nothing",
    "nowhere", "oughtnt", "shant", "shouldnt", "uhuh", "wasnt", "werent", "oughtn't", "shan't",
    "shouldn't", "uh-uh", "wasn't", "weren't", "without", "wont", "wouldnt", "won't", "wouldn't",
    "rarely", "seldom", "despite",
];

/// Degree modifiers and their increments.
pub fn booster_map() -> HashMap<&'static str, f64> {
    let incr: &[&str] = &[
        "absolutely",
        "amazingly",
        "awfully",
        "completely",
        "considerable",
        "considerably",
        "decidedly",
        "deeply",
        "effing",
        "enormous",
        "enormously",
        "entirely",
        "especially",
        "exceptional",
        "exceptionally",
        "extreme",
        "extremely",
        "fabulously",
        "flipping",
        "flippin",
        "frackin",
        "fracking",
        "fricking",
        "frickin",
        "frigging",
        "friggin",
        "fully",
        "fuckin",
        "fucking",
        "fuggin",
        "fugging",
        "greatly",
        "hella",
        "highly",
        "hugely",
        "incredible",
        "incredibly",
        "intensely",
        "major",
        "majorly",
        "more",
        "most",
        "particularly",
        "purely",
        "quite",
        "really",
        "remarkably",
        "so",
        "substantially",
        "thoroughly",
        "total",
        "totally",
        "tremendous",
        "tremendously",
        "uber",
        "unbelievably",
        "unusually",
        "utter",
        "utterly",
        "very",
    ];
    let decr: &[&str] = &[
        "almost",
        "barely",
        "hardly",
        "kinda",
        "kindof",
        "kind-of",
        "less",
        "little",
        "marginal",
        "marginally",
        "occasional",
        "occasionally",
        "partly",
        "scarce",
        "scarcely",
        "slight",
        "slightly",
        "somewhat",
        "sorta",
        "sortof",
        "sort-of",
    ];
    let mut map = HashMap::with_capacity(incr.len() + decr.len());
    for w in incr {
        map.insert(*w, BOOSTER_INCR);
    }
    for w in decr {
        map.insert(*w, BOOSTER_DECR);
    }
    map
}
