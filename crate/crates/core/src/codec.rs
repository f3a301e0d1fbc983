//! Indexed-context rendering, answer encoding and repair of generated index
//! streams.
//!
//! Two output representations are supported. Full-index lists every answer
//! unit. Span-index lists a `start end` pair per answer span. Both are plain
//! whitespace-separated decimal integers in display space, i.e. internal
//! 0-based index plus a [`DisplayOffset`].

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::span::{merge_sorted, AnswerSet, Granularity, QaInstance, Span};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Representation {
    #[serde(rename = "fi")]
    FullIndex,
    #[serde(rename = "si")]
    SpanIndex,
}

impl fmt::Display for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Representation::FullIndex => f.write_str("fi"),
            Representation::SpanIndex => f.write_str("si"),
        }
    }
}

/// Shift between internal 0-based indexes and the numbers shown to the
/// model. Either 0 or 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct DisplayOffset(u8);

impl DisplayOffset {
    pub const ZERO: DisplayOffset = DisplayOffset(0);
    pub const ONE: DisplayOffset = DisplayOffset(1);

    /// Sentences are numbered from 1, tokens from 0.
    pub fn default_for(granularity: Granularity) -> Self {
        match granularity {
            Granularity::Sentence => DisplayOffset::ONE,
            Granularity::Token => DisplayOffset::ZERO,
        }
    }

    pub fn get(self) -> usize {
        self.0 as usize
    }
}

impl TryFrom<u64> for DisplayOffset {
    type Error = Error;

    fn try_from(v: u64) -> Result<Self> {
        match v {
            0 => Ok(DisplayOffset::ZERO),
            1 => Ok(DisplayOffset::ONE),
            other => Err(Error::InvalidOffset(other)),
        }
    }
}

impl From<DisplayOffset> for u64 {
    fn from(o: DisplayOffset) -> u64 {
        o.0 as u64
    }
}

/// Raw index stream as produced by a generator. No validity guarantee:
/// values may be unsorted, duplicated, unpaired, negative or out of range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexSequence {
    pub values: Vec<i64>,
    pub representation: Representation,
    pub n_units: usize,
    pub offset: DisplayOffset,
}

impl IndexSequence {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            out.push_str(&v.to_string());
        }
        out
    }
}

/// Counts of every repair applied while decoding. All zero iff the input
/// was already a canonical sequence.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepairReport {
    pub n_sorted: usize,
    pub n_duplicates_removed: usize,
    pub n_out_of_range_removed: usize,
    pub n_unpaired_pruned: usize,
    pub n_invalid_spans_removed: usize,
    pub n_spans_merged: usize,
}

impl RepairReport {
    pub fn is_clean(&self) -> bool {
        *self == RepairReport::default()
    }

    /// Sum of all repair counts.
    pub fn total(&self) -> usize {
        self.n_sorted
            + self.n_duplicates_removed
            + self.n_out_of_range_removed
            + self.n_unpaired_pruned
            + self.n_invalid_spans_removed
            + self.n_spans_merged
    }

    pub fn combine(self, other: RepairReport) -> RepairReport {
        RepairReport {
            n_sorted: self.n_sorted + other.n_sorted,
            n_duplicates_removed: self.n_duplicates_removed + other.n_duplicates_removed,
            n_out_of_range_removed: self.n_out_of_range_removed + other.n_out_of_range_removed,
            n_unpaired_pruned: self.n_unpaired_pruned + other.n_unpaired_pruned,
            n_invalid_spans_removed: self.n_invalid_spans_removed + other.n_invalid_spans_removed,
            n_spans_merged: self.n_spans_merged + other.n_spans_merged,
        }
    }
}

/// Joins context units with single spaces, optionally prefixing each with
/// its display index.
pub fn render_context(inst: &QaInstance, with_index: bool, offset: DisplayOffset) -> String {
    let mut out = String::new();
    for (i, unit) in inst.units().iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        if with_index {
            out.push_str(&(i + offset.get()).to_string());
            out.push(' ');
        }
        out.push_str(unit);
    }
    out
}

pub fn encode(gold: &AnswerSet, rep: Representation, offset: DisplayOffset) -> IndexSequence {
    let shift = |u: usize| (u + offset.get()) as i64;
    let values = match rep {
        Representation::FullIndex => gold.units().map(shift).collect(),
        Representation::SpanIndex => gold
            .spans()
            .iter()
            .flat_map(|s| [shift(s.start()), shift(s.end())])
            .collect(),
    };
    IndexSequence {
        values,
        representation: rep,
        n_units: gold.n_units(),
        offset,
    }
}

pub fn decode(seq: &IndexSequence) -> (AnswerSet, RepairReport) {
    match seq.representation {
        Representation::FullIndex => decode_fi(seq),
        Representation::SpanIndex => decode_si(seq),
    }
}

/// Decodes many streams, preserving input order.
pub fn decode_batch(seqs: &[IndexSequence], exec: Exec) -> Vec<(AnswerSet, RepairReport)> {
    exec.map(seqs, decode)
}

fn to_internal(v: i64, offset: DisplayOffset) -> i64 {
    v.saturating_sub(offset.get() as i64)
}

fn in_range(v: i64, n_units: usize) -> bool {
    v >= 0 && (v as u64) < n_units as u64
}

/// Number of positions whose value differs between `before` and its sorted
/// version `after`.
fn count_moved<T: PartialEq>(before: &[T], after: &[T]) -> usize {
    before.iter().zip(after).filter(|(a, b)| a != b).count()
}

/// Full-index repair: sort, drop duplicates, drop out-of-range values,
/// coalesce consecutive indexes into spans.
pub fn decode_fi(seq: &IndexSequence) -> (AnswerSet, RepairReport) {
    let mut report = RepairReport::default();
    let raw: Vec<i64> = seq.values.iter().map(|&v| to_internal(v, seq.offset)).collect();

    let mut values = raw.clone();
    values.sort_unstable();
    report.n_sorted = count_moved(&raw, &values);

    let before = values.len();
    values.dedup();
    report.n_duplicates_removed = before - values.len();

    let before = values.len();
    values.retain(|&v| in_range(v, seq.n_units));
    report.n_out_of_range_removed = before - values.len();

    let mut spans: Vec<Span> = Vec::new();
    for v in values {
        let u = v as usize;
        match spans.last_mut() {
            Some(last) if last.end() + 1 == u => *last = Span::new(last.start(), u).unwrap(),
            _ => spans.push(Span::unit(u)),
        }
    }
    (AnswerSet::from_canonical(spans, seq.n_units), report)
}

/// Span-index repair: prune an unpaired trailing value, pair positionally,
/// drop inverted or out-of-range pairs, then merge overlapping survivors.
pub fn decode_si(seq: &IndexSequence) -> (AnswerSet, RepairReport) {
    let mut report = RepairReport::default();
    let mut values: Vec<i64> = seq.values.iter().map(|&v| to_internal(v, seq.offset)).collect();

    if values.len() % 2 == 1 {
        values.pop();
        report.n_unpaired_pruned = 1;
    }

    let mut spans = Vec::with_capacity(values.len() / 2);
    for pair in values.chunks_exact(2) {
        let (start, end) = (pair[0], pair[1]);
        if start > end {
            report.n_invalid_spans_removed += 1;
        } else if !in_range(start, seq.n_units) || !in_range(end, seq.n_units) {
            report.n_out_of_range_removed += 1;
        } else {
            spans.push(Span::new(start as usize, end as usize).unwrap());
        }
    }

    let emitted = spans.clone();
    spans.sort();
    report.n_sorted = count_moved(&emitted, &spans);

    let (merged, absorbed) = merge_sorted(spans);
    report.n_spans_merged = absorbed;
    (AnswerSet::from_canonical(merged, seq.n_units), report)
}

/// Lexed generator output plus the number of tokens that were not integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedIndexText {
    pub sequence: IndexSequence,
    pub skipped: usize,
}

/// Extracts whitespace-separated integers from model output. Surrounding
/// punctuation such as `(`, `)` or `,` is stripped; anything else that is
/// not an integer is skipped and counted. Integers beyond the `i64` range
/// saturate (they are out of range for any context anyway).
pub fn parse_index_text(text: &str, rep: Representation, n_units: usize, offset: DisplayOffset) -> ParsedIndexText {
    let mut values = Vec::new();
    let mut skipped = 0;
    for tok in text.split_whitespace() {
        match lex_integer(tok) {
            Some(v) => values.push(v),
            None => skipped += 1,
        }
    }
    ParsedIndexText {
        sequence: IndexSequence {
            values,
            representation: rep,
            n_units,
            offset,
        },
        skipped,
    }
}

fn lex_integer(tok: &str) -> Option<i64> {
    let t = tok.trim_matches(|c: char| c.is_ascii_punctuation() && c != '-' && c != '+');
    let (negative, digits) = match t.as_bytes().first()? {
        b'-' => (true, &t[1..]),
        b'+' => (false, &t[1..]),
        _ => (false, t),
    };
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let magnitude = digits.parse::<i64>().unwrap_or(i64::MAX);
    Some(if negative { -magnitude } else { magnitude })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(values: &[i64], rep: Representation, n_units: usize, offset: DisplayOffset) -> IndexSequence {
        IndexSequence {
            values: values.to_vec(),
            representation: rep,
            n_units,
            offset,
        }
    }

    fn pairs(a: &AnswerSet) -> Vec<(usize, usize)> {
        a.spans().iter().map(|s| (s.start(), s.end())).collect()
    }

    fn answer(spans: &[(usize, usize)], n: usize) -> AnswerSet {
        AnswerSet::new(spans.iter().map(|&(s, e)| Span::new(s, e).unwrap()), n).unwrap()
    }

    #[test]
    fn offset_rejects_values_above_one() {
        assert!(DisplayOffset::try_from(2).is_err());
        assert_eq!(DisplayOffset::try_from(1).unwrap(), DisplayOffset::ONE);
        assert_eq!(DisplayOffset::default_for(Granularity::Sentence), DisplayOffset::ONE);
        assert_eq!(DisplayOffset::default_for(Granularity::Token), DisplayOffset::ZERO);
    }

    #[test]
    fn render_without_index() {
        let inst = QaInstance::new("x", vec![], vec!["hello".into()], Granularity::Token, None).unwrap();
        assert_eq!(render_context(&inst, false, DisplayOffset::ZERO), "hello");
        assert_eq!(render_context(&inst, true, DisplayOffset::ZERO), "0 hello");
        assert_eq!(render_context(&inst, true, DisplayOffset::ONE), "1 hello");
    }

    #[test]
    fn encode_examples() {
        let g = answer(&[(15, 15), (27, 27)], 59);
        assert_eq!(
            encode(&g, Representation::FullIndex, DisplayOffset::ZERO).to_text(),
            "15 27"
        );
        assert_eq!(
            encode(&g, Representation::SpanIndex, DisplayOffset::ZERO).to_text(),
            "15 15 27 27"
        );

        let g = answer(&[(1, 1), (4, 5), (7, 7)], 18);
        assert_eq!(
            encode(&g, Representation::FullIndex, DisplayOffset::ZERO).to_text(),
            "1 4 5 7"
        );
        assert_eq!(
            encode(&g, Representation::SpanIndex, DisplayOffset::ZERO).to_text(),
            "1 1 4 5 7 7"
        );

        let e = AnswerSet::empty(4);
        assert_eq!(encode(&e, Representation::FullIndex, DisplayOffset::ONE).to_text(), "");
        assert_eq!(encode(&e, Representation::SpanIndex, DisplayOffset::ONE).to_text(), "");
    }

    #[test]
    fn decode_fi_sorts_dedupes_and_filters() {
        let (a, r) = decode_fi(&seq(&[7, 3, 3, 99], Representation::FullIndex, 10, DisplayOffset::ZERO));
        assert_eq!(pairs(&a), vec![(3, 3), (7, 7)]);
        assert_eq!(r.n_duplicates_removed, 1);
        assert_eq!(r.n_out_of_range_removed, 1);
        assert_eq!(r.n_sorted, 2);
        assert_eq!(r.n_unpaired_pruned + r.n_invalid_spans_removed + r.n_spans_merged, 0);
    }

    #[test]
    fn decode_fi_display_offset() {
        let (a, r) = decode_fi(&seq(&[1, 4, 5, 7], Representation::FullIndex, 18, DisplayOffset::ONE));
        assert_eq!(pairs(&a), vec![(0, 0), (3, 4), (6, 6)]);
        assert!(r.is_clean());
        // display 0 is internal -1 under offset 1
        let (a, r) = decode_fi(&seq(&[0, 1], Representation::FullIndex, 18, DisplayOffset::ONE));
        assert_eq!(pairs(&a), vec![(0, 0)]);
        assert_eq!(r.n_out_of_range_removed, 1);
    }

    #[test]
    fn decode_empty_is_clean() {
        for rep in [Representation::FullIndex, Representation::SpanIndex] {
            let (a, r) = decode(&seq(&[], rep, 5, DisplayOffset::ZERO));
            assert!(a.is_empty());
            assert_eq!(a.n_units(), 5);
            assert!(r.is_clean());
        }
    }

    #[test]
    fn decode_si_prunes_and_drops_invalid() {
        let (a, r) = decode_si(&seq(
            &[2, 5, 9, 7, 4],
            Representation::SpanIndex,
            10,
            DisplayOffset::ZERO,
        ));
        assert_eq!(pairs(&a), vec![(2, 5)]);
        assert_eq!(r.n_unpaired_pruned, 1);
        assert_eq!(r.n_invalid_spans_removed, 1);
        assert_eq!(r.total(), 2);
    }

    #[test]
    fn decode_si_merges_overlaps() {
        let (a, r) = decode_si(&seq(&[1, 3, 2, 5], Representation::SpanIndex, 10, DisplayOffset::ZERO));
        assert_eq!(pairs(&a), vec![(1, 5)]);
        assert_eq!(r.n_spans_merged, 1);
        assert_eq!(r.total(), 1);
    }

    #[test]
    fn decode_si_identical_pairs_count_as_merge() {
        let (a, r) = decode_si(&seq(&[4, 6, 4, 6], Representation::SpanIndex, 10, DisplayOffset::ZERO));
        assert_eq!(pairs(&a), vec![(4, 6)]);
        assert_eq!(r.n_spans_merged, 1);
        assert_eq!(r.n_duplicates_removed, 0);
    }

    #[test]
    fn decode_si_out_of_order_and_out_of_range() {
        let (a, r) = decode_si(&seq(
            &[7, 8, 1, 2, 3, 12, -1, 0],
            Representation::SpanIndex,
            10,
            DisplayOffset::ZERO,
        ));
        assert_eq!(pairs(&a), vec![(1, 2), (7, 8)]);
        assert_eq!(r.n_out_of_range_removed, 2);
        assert_eq!(r.n_sorted, 2);
    }

    #[test]
    fn decode_si_keeps_adjacent_spans() {
        let (a, r) = decode_si(&seq(&[1, 2, 3, 4], Representation::SpanIndex, 10, DisplayOffset::ZERO));
        assert_eq!(pairs(&a), vec![(1, 2), (3, 4)]);
        assert!(r.is_clean());
    }

    #[test]
    fn decode_si_clinical_sequence() {
        let (a, r) = decode_si(&seq(
            &[1, 1, 4, 5, 7, 7],
            Representation::SpanIndex,
            18,
            DisplayOffset::ONE,
        ));
        assert_eq!(pairs(&a), vec![(0, 0), (3, 4), (6, 6)]);
        assert!(r.is_clean());
    }

    #[test]
    fn parse_examples() {
        let p = parse_index_text("1 4 5 7", Representation::FullIndex, 18, DisplayOffset::ONE);
        assert_eq!(p.sequence.values, vec![1, 4, 5, 7]);
        assert_eq!(p.skipped, 0);

        let p = parse_index_text("1, 4 and seven", Representation::FullIndex, 18, DisplayOffset::ONE);
        assert_eq!(p.sequence.values, vec![1, 4]);
        assert_eq!(p.skipped, 2);

        let p = parse_index_text("", Representation::SpanIndex, 3, DisplayOffset::ZERO);
        assert!(p.sequence.values.is_empty());
        assert_eq!(p.skipped, 0);
    }

    #[test]
    fn parse_edge_tokens() {
        let p = parse_index_text(
            "(1 1) (4 5) -3 +2 99999999999999999999999 7th - 1-2",
            Representation::SpanIndex,
            10,
            DisplayOffset::ZERO,
        );
        assert_eq!(p.sequence.values, vec![1, 1, 4, 5, -3, 2, i64::MAX]);
        assert_eq!(p.skipped, 3);
    }

    #[test]
    fn report_combine_and_total() {
        let a = RepairReport {
            n_sorted: 1,
            n_spans_merged: 2,
            ..Default::default()
        };
        let b = RepairReport {
            n_sorted: 3,
            n_unpaired_pruned: 1,
            ..Default::default()
        };
        let c = a.combine(b);
        assert_eq!(c.n_sorted, 4);
        assert_eq!(c.total(), 7);
    }
}
