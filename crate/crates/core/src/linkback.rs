//! Mapping a free-text answer back onto context sentences.
//!
//! Every sentence is scored by token overlap with the answer. The best
//! sentence is selected together with every sentence scoring within `delta`
//! of it, so answers drawn from several sentences are recovered whole.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::segment::{is_punctuation, tokenize};
use crate::span::{AnswerSet, Granularity, QaInstance};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkbackConfig {
    /// Maximum score deficit, relative to the best sentence, for a sentence
    /// to be selected. 0 keeps only the top-scoring sentences.
    pub delta: f64,
    /// Divide the overlap by the sentence's token count.
    pub normalize: bool,
    pub lowercase: bool,
    /// Ignore tokens made only of punctuation.
    pub skip_punctuation: bool,
}

impl Default for LinkbackConfig {
    fn default() -> Self {
        LinkbackConfig {
            delta: 0.05,
            normalize: true,
            lowercase: true,
            skip_punctuation: true,
        }
    }
}

impl LinkbackConfig {
    fn terms(&self, text: &str) -> Vec<String> {
        tokenize(text)
            .into_iter()
            .filter(|t| !(self.skip_punctuation && is_punctuation(t)))
            .map(|t| {
                if self.lowercase {
                    t.to_lowercase()
                } else {
                    t.to_string()
                }
            })
            .collect()
    }
}

fn counts(terms: &[String]) -> HashMap<&str, usize> {
    let mut m = HashMap::new();
    for t in terms {
        *m.entry(t.as_str()).or_insert(0) += 1;
    }
    m
}

fn score_terms(sentence: &[String], answer: &HashMap<&str, usize>, normalize: bool) -> f64 {
    if sentence.is_empty() {
        return 0.0;
    }
    let shared: usize = counts(sentence)
        .into_iter()
        .map(|(t, c)| c.min(answer.get(t).copied().unwrap_or(0)))
        .sum();
    if normalize {
        shared as f64 / sentence.len() as f64
    } else {
        shared as f64
    }
}

/// Multiset token overlap between a sentence and an answer.
pub fn overlap_score(sentence: &str, answer: &str, cfg: &LinkbackConfig) -> f64 {
    let answer_terms = cfg.terms(answer);
    score_terms(&cfg.terms(sentence), &counts(&answer_terms), cfg.normalize)
}

/// Per-sentence overlap scores for an answer.
pub fn sentence_scores(answer_text: &str, sentences: &[String], cfg: &LinkbackConfig) -> Vec<f64> {
    let answer_terms = cfg.terms(answer_text);
    let answer_counts = counts(&answer_terms);
    sentences
        .iter()
        .map(|s| score_terms(&cfg.terms(s), &answer_counts, cfg.normalize))
        .collect()
}

pub fn link_back(answer_text: &str, inst: &QaInstance, cfg: &LinkbackConfig) -> Result<AnswerSet> {
    if inst.granularity() != Granularity::Sentence {
        return Err(Error::GranularityMismatch {
            expected: Granularity::Sentence,
            found: inst.granularity(),
        });
    }
    let scores = sentence_scores(answer_text, inst.units(), cfg);
    let best = scores.iter().copied().fold(0.0, f64::max);
    if best <= 0.0 {
        return Ok(AnswerSet::empty(inst.n_units()));
    }
    let threshold = best - cfg.delta.max(0.0);
    let selected = scores
        .iter()
        .enumerate()
        .filter(|&(_, &s)| s > 0.0 && s >= threshold)
        .map(|(i, _)| i);
    AnswerSet::from_units(selected, inst.n_units())
}
