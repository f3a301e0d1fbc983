//! Rule-based tokenization and sentence splitting.
//!
//! Used to count tokens for trimming, to tokenize questions and answer text,
//! and as a fallback splitter for sources that do not ship segmented
//! sentences.

/// Splits on whitespace, then separates each run of alphanumeric characters
/// from every other non-space character, which becomes its own token.
pub fn tokenize(text: &str) -> Vec<&str> {
    let mut tokens = Vec::new();
    let mut word_start: Option<usize> = None;
    for (i, c) in text.char_indices() {
        if c.is_alphanumeric() {
            word_start.get_or_insert(i);
            continue;
        }
        if let Some(s) = word_start.take() {
            tokens.push(&text[s..i]);
        }
        if !c.is_whitespace() {
            tokens.push(&text[i..i + c.len_utf8()]);
        }
    }
    if let Some(s) = word_start {
        tokens.push(&text[s..]);
    }
    tokens
}

pub fn token_count(text: &str) -> usize {
    tokenize(text).len()
}

pub fn is_punctuation(token: &str) -> bool {
    !token.is_empty() && token.chars().all(|c| !c.is_alphanumeric())
}

const ABBREVIATIONS: &[&str] = &[
    "dr", "mr", "mrs", "ms", "prof", "sr", "jr", "st", "vs", "etc", "e.g", "i.e", "fig", "no", "vol", "approx", "inc",
    "ltd", "co", "jan", "feb", "mar", "apr", "jun", "jul", "aug", "sep", "sept", "oct", "nov", "dec",
];

/// Byte ranges of the sentences in `text`.
///
/// A boundary is a `.`, `?` or `!` followed by whitespace and then an
/// uppercase letter, unless the word ending in `.` is a known abbreviation
/// or a single letter (an initial).
pub fn sentence_bounds(text: &str) -> Vec<(usize, usize)> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut bounds = Vec::new();
    let mut start = 0;
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        if matches!(c, '.' | '?' | '!') {
            let mut j = i + 1;
            while j < chars.len() && chars[j].1.is_whitespace() {
                j += 1;
            }
            let has_gap = j > i + 1;
            let next_upper = j < chars.len() && chars[j].1.is_uppercase();
            if has_gap && next_upper && !(c == '.' && ends_with_abbreviation(&text[start..pos])) {
                push_trimmed(text, start, pos + c.len_utf8(), &mut bounds);
                start = chars[j].0;
                i = j;
                continue;
            }
        }
        i += 1;
    }
    push_trimmed(text, start, text.len(), &mut bounds);
    bounds
}

pub fn split_sentences(text: &str) -> Vec<&str> {
    sentence_bounds(text).into_iter().map(|(s, e)| &text[s..e]).collect()
}

fn ends_with_abbreviation(before_period: &str) -> bool {
    let word = before_period
        .rsplit(|c: char| c.is_whitespace() || c == '(')
        .next()
        .unwrap_or("");
    let lower = word.to_lowercase();
    (word.chars().count() == 1 && word.chars().all(char::is_alphabetic)) || ABBREVIATIONS.contains(&lower.as_str())
}

fn push_trimmed(text: &str, start: usize, end: usize, out: &mut Vec<(usize, usize)>) {
    let slice = &text[start..end];
    let lead = slice.len() - slice.trim_start().len();
    let trimmed = slice.trim();
    if !trimmed.is_empty() {
        out.push((start + lead, start + lead + trimmed.len()));
    }
}
