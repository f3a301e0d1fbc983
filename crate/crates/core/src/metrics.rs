//! Precision, recall and F1 under four regimes.
//!
//! * sentence / token level: overlap of answer unit sets.
//! * exact match: a span counts only if `(start, end)` matches exactly.
//! * partial match: each span earns its best overlap ratio against the
//!   other side.
//!
//! Every regime reduces an instance to a [`Tally`] of precision and recall
//! credit. Macro aggregation averages per-instance scores; micro aggregation
//! pools tallies before taking ratios. An empty prediction against an empty
//! gold answer scores 1; an empty side against a non-empty one scores 0.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::span::AnswerSet;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl Prf {
    pub fn new(precision: f64, recall: f64) -> Self {
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        Prf { precision, recall, f1 }
    }

    pub fn perfect() -> Self {
        Prf::new(1.0, 1.0)
    }
}

fn round6(x: f64) -> f64 {
    (x * 1e6).round() / 1e6
}

fn ser_round6<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(round6(*x))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    #[serde(rename = "sentence")]
    SentenceLevel,
    #[serde(rename = "token")]
    TokenLevel,
    #[serde(rename = "em")]
    ExactMatch,
    #[serde(rename = "pm")]
    PartialMatch,
}

impl Regime {
    pub fn default_aggregation(self) -> Aggregation {
        match self {
            Regime::SentenceLevel | Regime::TokenLevel => Aggregation::MacroOverInstances,
            Regime::ExactMatch | Regime::PartialMatch => Aggregation::MicroOverSpans,
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::SentenceLevel => "sentence",
            Regime::TokenLevel => "token",
            Regime::ExactMatch => "em",
            Regime::PartialMatch => "pm",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Aggregation {
    #[serde(rename = "macro")]
    MacroOverInstances,
    #[serde(rename = "micro")]
    MicroOverSpans,
}

/// Precision credit over a precision denominator, recall credit over a
/// recall denominator. Adds componentwise.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Tally {
    pub p_credit: f64,
    pub p_total: f64,
    pub r_credit: f64,
    pub r_total: f64,
}

impl Tally {
    pub fn prf(&self) -> Prf {
        match (self.p_total > 0.0, self.r_total > 0.0) {
            (false, false) => Prf::perfect(),
            (true, true) => Prf::new(self.p_credit / self.p_total, self.r_credit / self.r_total),
            _ => Prf::default(),
        }
    }

    pub fn combine(self, o: Tally) -> Tally {
        Tally {
            p_credit: self.p_credit + o.p_credit,
            p_total: self.p_total + o.p_total,
            r_credit: self.r_credit + o.r_credit,
            r_total: self.r_total + o.r_total,
        }
    }
}

fn check_units(pred: &AnswerSet, gold: &AnswerSet) -> Result<()> {
    if pred.n_units() != gold.n_units() {
        return Err(Error::UnitCountMismatch {
            pred: pred.n_units(),
            gold: gold.n_units(),
        });
    }
    Ok(())
}

pub fn unit_tally(pred: &AnswerSet, gold: &AnswerSet) -> Result<Tally> {
    check_units(pred, gold)?;
    let shared: usize = pred
        .spans()
        .iter()
        .map(|p| gold.spans().iter().map(|g| p.overlap_len(*g)).sum::<usize>())
        .sum();
    Ok(Tally {
        p_credit: shared as f64,
        p_total: pred.unit_count() as f64,
        r_credit: shared as f64,
        r_total: gold.unit_count() as f64,
    })
}

pub fn em_tally(pred: &AnswerSet, gold: &AnswerSet) -> Result<Tally> {
    check_units(pred, gold)?;
    let gold_spans: HashSet<_> = gold.spans().iter().collect();
    let matched = pred.spans().iter().filter(|p| gold_spans.contains(p)).count();
    Ok(Tally {
        p_credit: matched as f64,
        p_total: pred.span_count() as f64,
        r_credit: matched as f64,
        r_total: gold.span_count() as f64,
    })
}

pub fn pm_tally(pred: &AnswerSet, gold: &AnswerSet) -> Result<Tally> {
    check_units(pred, gold)?;
    let best = |from: &AnswerSet, against: &AnswerSet| -> f64 {
        from.spans()
            .iter()
            .map(|a| {
                let top = against.spans().iter().map(|b| a.overlap_len(*b)).max().unwrap_or(0);
                top as f64 / a.len() as f64
            })
            .sum()
    };
    Ok(Tally {
        p_credit: best(pred, gold),
        p_total: pred.span_count() as f64,
        r_credit: best(gold, pred),
        r_total: gold.span_count() as f64,
    })
}

pub fn regime_tally(regime: Regime, pred: &AnswerSet, gold: &AnswerSet) -> Result<Tally> {
    match regime {
        Regime::SentenceLevel | Regime::TokenLevel => unit_tally(pred, gold),
        Regime::ExactMatch => em_tally(pred, gold),
        Regime::PartialMatch => pm_tally(pred, gold),
    }
}

/// Unit-set precision/recall/F1; serves both sentence and token level.
pub fn unit_prf(pred: &AnswerSet, gold: &AnswerSet) -> Result<Prf> {
    Ok(unit_tally(pred, gold)?.prf())
}

pub fn em_prf(pred: &AnswerSet, gold: &AnswerSet) -> Result<Prf> {
    Ok(em_tally(pred, gold)?.prf())
}

pub fn pm_prf(pred: &AnswerSet, gold: &AnswerSet) -> Result<Prf> {
    Ok(pm_tally(pred, gold)?.prf())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstanceScore {
    pub id: String,
    #[serde(rename = "p", serialize_with = "ser_round6")]
    pub precision: f64,
    #[serde(rename = "r", serialize_with = "ser_round6")]
    pub recall: f64,
    #[serde(serialize_with = "ser_round6")]
    pub f1: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AggregateScore {
    #[serde(rename = "p", serialize_with = "ser_round6")]
    pub precision: f64,
    #[serde(rename = "r", serialize_with = "ser_round6")]
    pub recall: f64,
    #[serde(serialize_with = "ser_round6")]
    pub f1: f64,
}

impl From<Prf> for AggregateScore {
    fn from(p: Prf) -> Self {
        AggregateScore {
            precision: p.precision,
            recall: p.recall,
            f1: p.f1,
        }
    }
}

/// Serializes as `{regime, aggregation, aggregate:{p,r,f1}, per_instance:[{id,p,r,f1}]}`
/// with ratios rounded to 6 decimal places.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub regime: Regime,
    pub aggregation: Aggregation,
    pub aggregate: AggregateScore,
    pub per_instance: Vec<InstanceScore>,
}

impl EvalReport {
    pub fn aggregate_prf(&self) -> Prf {
        Prf {
            precision: self.aggregate.precision,
            recall: self.aggregate.recall,
            f1: self.aggregate.f1,
        }
    }
}

/// One scored item: prediction, gold answer and instance id.
pub type EvalPair<'a> = (&'a AnswerSet, &'a AnswerSet, &'a str);

pub fn evaluate_corpus(pairs: &[EvalPair<'_>], regime: Regime, aggregation: Aggregation) -> Result<EvalReport> {
    evaluate_corpus_with(pairs, regime, aggregation, Exec::default())
}

pub fn evaluate_corpus_with(
    pairs: &[EvalPair<'_>],
    regime: Regime,
    aggregation: Aggregation,
    exec: Exec,
) -> Result<EvalReport> {
    if pairs.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut seen = HashSet::with_capacity(pairs.len());
    for (_, _, id) in pairs {
        if !seen.insert(*id) {
            return Err(Error::DuplicateId(id.to_string()));
        }
    }

    let tallies = exec
        .map(pairs, |(pred, gold, _)| regime_tally(regime, pred, gold))
        .into_iter()
        .collect::<Result<Vec<Tally>>>()?;

    let per_instance: Vec<InstanceScore> = pairs
        .iter()
        .zip(&tallies)
        .map(|((_, _, id), t)| {
            let prf = t.prf();
            InstanceScore {
                id: id.to_string(),
                precision: prf.precision,
                recall: prf.recall,
                f1: prf.f1,
            }
        })
        .collect();

    let aggregate = match aggregation {
        Aggregation::MacroOverInstances => {
            let n = per_instance.len() as f64;
            let mean = |f: fn(&InstanceScore) -> f64| per_instance.iter().map(f).sum::<f64>() / n;
            Prf {
                precision: mean(|s| s.precision),
                recall: mean(|s| s.recall),
                f1: mean(|s| s.f1),
            }
        }
        Aggregation::MicroOverSpans => tallies.iter().fold(Tally::default(), |a, b| a.combine(*b)).prf(),
    };

    Ok(EvalReport {
        regime,
        aggregation,
        aggregate: aggregate.into(),
        per_instance,
    })
}
