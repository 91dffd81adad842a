//! Deterministic lowercase tokenizer shared by query matching, vocabulary
//! building, and the offensive-term baseline.

/// Characters that may appear inside a token but never at its edges.
fn is_joiner(c: char) -> bool {
    c == '-' || c == '\'' || c == '\u{2019}'
}

fn is_token_char(c: char) -> bool {
    c.is_alphanumeric() || is_joiner(c)
}

/// Split text into lowercase tokens.
///
/// Splits on whitespace and punctuation; hyphens and apostrophes are kept
/// when they sit between other token characters ("asylum-seeker's" stays
/// one token), and are trimmed from token edges otherwise. Digits are
/// tokens like any other.
pub fn tokenize(text: &str) -> Vec<String> {
    let lower = text.to_lowercase();
    lower
        .split(|c: char| !is_token_char(c))
        .flat_map(|raw| {
            let trimmed = raw.trim_matches(is_joiner);
            if trimmed.is_empty() {
                None
            } else {
                Some(trimmed.to_string())
            }
        })
        .collect()
}

/// Split text into sentences on '.', '!', '?', ';' and newlines.
///
/// Used to pick candidate contexts for mined word pairs; not a linguistic
/// segmenter. Empty segments are dropped, terminators are not kept.
pub fn split_sentences(text: &str) -> Vec<String> {
    text.split(['.', '!', '?', ';', '\n'])
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_input_gives_no_tokens() {
        assert!(tokenize("").is_empty());
    }

    #[test]
    fn splits_on_whitespace_and_punctuation() {
        assert_eq!(tokenize("Syrian refugees fled."), ["syrian", "refugees", "fled"]);
    }

    #[test]
    fn keeps_internal_hyphen_and_apostrophe() {
        assert_eq!(
            tokenize("asylum-seeker's journey"),
            ["asylum-seeker's", "journey"]
        );
    }

    #[test]
    fn trims_edge_joiners() {
        assert_eq!(tokenize("-well- 'quoted'"), ["well", "quoted"]);
        assert!(tokenize("--- ''").is_empty());
    }

    #[test]
    fn keeps_digits() {
        assert_eq!(tokenize("15,479 refugees in 2016"), ["15", "479", "refugees", "in", "2016"]);
    }

    #[test]
    fn lowercases_unicode() {
        assert_eq!(tokenize("ZAʼATARI Café"), ["zaʼatari", "café"]);
    }

    #[test]
    fn sentences_split_on_terminators() {
        let s = split_sentences("First one. Second one! Third?  ");
        assert_eq!(s, ["First one", "Second one", "Third"]);
    }
}
