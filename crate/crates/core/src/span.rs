//! Spans, canonical answer sets and QA instances.
//!
//! All indexing here is 0-based. The 1-based display used for sentence
//! indexes is applied only by the codec.

use std::fmt;

use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Granularity {
    Token,
    Sentence,
}

impl fmt::Display for Granularity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Granularity::Token => f.write_str("token"),
            Granularity::Sentence => f.write_str("sentence"),
        }
    }
}

/// Closed interval `start..=end` over context units.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Span {
    start: usize,
    end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Result<Self> {
        if start > end {
            return Err(Error::InvalidSpan { start, end });
        }
        Ok(Span { start, end })
    }

    pub fn unit(index: usize) -> Self {
        Span {
            start: index,
            end: index,
        }
    }

    pub fn start(self) -> usize {
        self.start
    }

    pub fn end(self) -> usize {
        self.end
    }

    #[allow(clippy::len_without_is_empty)] // a span always covers at least one unit
    pub fn len(self) -> usize {
        self.end - self.start + 1
    }

    pub fn contains(self, index: usize) -> bool {
        self.start <= index && index <= self.end
    }

    pub fn overlaps(self, other: Span) -> bool {
        self.start <= other.end && other.start <= self.end
    }

    /// Number of units shared with `other`.
    pub fn overlap_len(self, other: Span) -> usize {
        let lo = self.start.max(other.start);
        let hi = self.end.min(other.end);
        if lo > hi {
            0
        } else {
            hi - lo + 1
        }
    }

    pub fn units(self) -> std::ops::RangeInclusive<usize> {
        self.start..=self.end
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.start, self.end)
    }
}

impl Serialize for Span {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        [self.start, self.end].serialize(serializer)
    }
}

/// Sorted, pairwise disjoint spans over a context of `n_units` units.
///
/// Overlapping or nested spans never survive construction. Adjacent spans
/// (`a.end + 1 == b.start`) are kept apart.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AnswerSet {
    spans: Vec<Span>,
    n_units: usize,
}

impl AnswerSet {
    pub fn empty(n_units: usize) -> Self {
        AnswerSet {
            spans: Vec::new(),
            n_units,
        }
    }

    /// Builds a canonical set from arbitrary in-range spans, merging overlaps.
    pub fn new(spans: impl IntoIterator<Item = Span>, n_units: usize) -> Result<Self> {
        merge_spans(spans, n_units)
    }

    /// Builds a set from unit indexes; consecutive indexes coalesce.
    pub fn from_units(units: impl IntoIterator<Item = usize>, n_units: usize) -> Result<Self> {
        let mut mask = vec![false; n_units];
        for u in units {
            if u >= n_units {
                return Err(Error::SpanOutOfRange {
                    span: Span::unit(u),
                    n_units,
                });
            }
            mask[u] = true;
        }
        Ok(mask_to_spans(&mask))
    }

    /// Caller guarantees canonical form.
    pub(crate) fn from_canonical(spans: Vec<Span>, n_units: usize) -> Self {
        debug_assert!(is_canonical(&spans, n_units));
        AnswerSet { spans, n_units }
    }

    pub fn spans(&self) -> &[Span] {
        &self.spans
    }

    pub fn n_units(&self) -> usize {
        self.n_units
    }

    pub fn is_empty(&self) -> bool {
        self.spans.is_empty()
    }

    pub fn span_count(&self) -> usize {
        self.spans.len()
    }

    /// Total number of answer units.
    pub fn unit_count(&self) -> usize {
        self.spans.iter().map(|s| s.len()).sum()
    }

    pub fn units(&self) -> impl Iterator<Item = usize> + '_ {
        self.spans.iter().flat_map(|s| s.units())
    }

    pub fn contains_unit(&self, index: usize) -> bool {
        let pos = self.spans.partition_point(|s| s.end < index);
        self.spans.get(pos).is_some_and(|s| s.contains(index))
    }

    /// First and last answer unit, if any.
    pub fn hull(&self) -> Option<Span> {
        Some(Span {
            start: self.spans.first()?.start,
            end: self.spans.last()?.end,
        })
    }
}

fn is_canonical(spans: &[Span], n_units: usize) -> bool {
    spans.iter().all(|s| s.start <= s.end && s.end < n_units) && spans.windows(2).all(|w| w[0].end < w[1].start)
}

/// Turns indicator flags into maximal runs.
pub fn mask_to_spans(mask: &[bool]) -> AnswerSet {
    let mut spans = Vec::new();
    let mut run_start = None;
    for (i, &on) in mask.iter().enumerate() {
        match (on, run_start) {
            (true, None) => run_start = Some(i),
            (false, Some(s)) => {
                spans.push(Span { start: s, end: i - 1 });
                run_start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = run_start {
        spans.push(Span {
            start: s,
            end: mask.len() - 1,
        });
    }
    AnswerSet::from_canonical(spans, mask.len())
}

pub fn spans_to_mask(answer: &AnswerSet) -> Vec<bool> {
    let mut mask = vec![false; answer.n_units];
    for span in &answer.spans {
        mask[span.start..=span.end].fill(true);
    }
    mask
}

/// Merges overlapping and nested spans. Adjacent spans stay separate.
pub fn merge_spans(raw: impl IntoIterator<Item = Span>, n_units: usize) -> Result<AnswerSet> {
    let mut spans: Vec<Span> = raw.into_iter().collect();
    if let Some(&span) = spans.iter().find(|s| s.end >= n_units) {
        return Err(Error::SpanOutOfRange { span, n_units });
    }
    spans.sort_unstable();
    let (merged, _) = merge_sorted(spans);
    Ok(AnswerSet::from_canonical(merged, n_units))
}

/// Merges a start-sorted span list, returning the canonical spans and the
/// number of spans absorbed into a predecessor.
pub(crate) fn merge_sorted(spans: Vec<Span>) -> (Vec<Span>, usize) {
    let before = spans.len();
    let mut out: Vec<Span> = Vec::with_capacity(before);
    for span in spans {
        match out.last_mut() {
            Some(last) if span.start <= last.end => last.end = last.end.max(span.end),
            _ => out.push(span),
        }
    }
    let absorbed = before - out.len();
    (out, absorbed)
}

/// One question over a segmented context, optionally with its gold answer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QaInstance {
    id: String,
    question: Vec<String>,
    units: Vec<String>,
    granularity: Granularity,
    gold: Option<AnswerSet>,
}

impl QaInstance {
    pub fn new(
        id: impl Into<String>,
        question: Vec<String>,
        units: Vec<String>,
        granularity: Granularity,
        gold: Option<AnswerSet>,
    ) -> Result<Self> {
        if units.is_empty() {
            return Err(Error::EmptyContext);
        }
        if let Some(g) = &gold {
            if g.n_units() != units.len() {
                return Err(Error::GoldUnitMismatch {
                    gold: g.n_units(),
                    context: units.len(),
                });
            }
        }
        Ok(QaInstance {
            id: id.into(),
            question,
            units,
            granularity,
            gold,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn question(&self) -> &[String] {
        &self.question
    }

    pub fn units(&self) -> &[String] {
        &self.units
    }

    pub fn n_units(&self) -> usize {
        self.units.len()
    }

    pub fn granularity(&self) -> Granularity {
        self.granularity
    }

    pub fn gold(&self) -> Option<&AnswerSet> {
        self.gold.as_ref()
    }
}
