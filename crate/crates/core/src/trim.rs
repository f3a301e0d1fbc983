//! Fitting contexts into a token budget without losing any answer unit.
//!
//! The window starts as the smallest contiguous run of units covering the
//! whole gold answer and grows one unit at a time, alternating left and right
//! (left first). A side closes once it reaches the context edge or its next
//! unit would overflow the budget. Sentence contexts grow by whole sentences,
//! so a sentence is never split.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::segment::token_count;
use crate::span::{AnswerSet, Granularity, QaInstance, Span};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DropReason {
    /// The gold answer alone needs more tokens than the budget.
    AnswerExceedsBudget,
    /// Unlabeled instance whose first unit alone overflows the budget.
    UnitExceedsBudget,
}

/// Maps original unit positions into the trimmed context.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OffsetMap {
    window: Span,
    n_original: usize,
}

impl OffsetMap {
    pub fn map(&self, original: usize) -> Option<usize> {
        self.window.contains(original).then(|| original - self.window.start())
    }

    pub fn window(&self) -> Span {
        self.window
    }

    pub fn is_identity(&self) -> bool {
        self.window.start() == 0 && self.window.len() == self.n_original
    }

    pub fn removed_units(&self) -> usize {
        self.n_original - self.window.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TrimResult {
    Trimmed {
        instance: QaInstance,
        /// Retained range of original units.
        window: Span,
        offset_map: OffsetMap,
        /// Token count of the retained units.
        n_tokens: usize,
    },
    Dropped {
        reason: DropReason,
    },
}

impl TrimResult {
    pub fn instance(&self) -> Option<&QaInstance> {
        match self {
            TrimResult::Trimmed { instance, .. } => Some(instance),
            TrimResult::Dropped { .. } => None,
        }
    }

    pub fn is_dropped(&self) -> bool {
        matches!(self, TrimResult::Dropped { .. })
    }
}

/// Token cost of each unit: 1 per token, or the sentence's token count.
pub fn unit_costs(inst: &QaInstance) -> Vec<usize> {
    match inst.granularity() {
        Granularity::Token => vec![1; inst.n_units()],
        Granularity::Sentence => inst.units().iter().map(|s| token_count(s)).collect(),
    }
}

pub fn trim(inst: &QaInstance, budget_tokens: usize) -> Result<TrimResult> {
    if budget_tokens == 0 {
        return Err(Error::InvalidBudget);
    }
    let costs = unit_costs(inst);
    let n = costs.len();

    let (lo, hi, used) = match inst.gold().and_then(AnswerSet::hull) {
        Some(core) => {
            let core_cost: usize = costs[core.start()..=core.end()].iter().sum();
            if core_cost > budget_tokens {
                return Ok(TrimResult::Dropped {
                    reason: DropReason::AnswerExceedsBudget,
                });
            }
            expand(&costs, core.start(), core.end(), core_cost, budget_tokens)
        }
        None => {
            if costs[0] > budget_tokens {
                return Ok(TrimResult::Dropped {
                    reason: DropReason::UnitExceedsBudget,
                });
            }
            let mut hi = 0;
            let mut used = costs[0];
            while hi + 1 < n && used + costs[hi + 1] <= budget_tokens {
                hi += 1;
                used += costs[hi];
            }
            (0, hi, used)
        }
    };

    let window = Span::new(lo, hi)?;
    let offset_map = OffsetMap { window, n_original: n };
    let gold = match inst.gold() {
        Some(g) => {
            let shifted = g
                .spans()
                .iter()
                .map(|s| Span::new(s.start() - lo, s.end() - lo))
                .collect::<Result<Vec<_>>>()?;
            Some(AnswerSet::new(shifted, window.len())?)
        }
        None => None,
    };
    let instance = QaInstance::new(
        inst.id(),
        inst.question().to_vec(),
        inst.units()[lo..=hi].to_vec(),
        inst.granularity(),
        gold,
    )?;
    Ok(TrimResult::Trimmed {
        instance,
        window,
        offset_map,
        n_tokens: used,
    })
}

fn expand(costs: &[usize], mut lo: usize, mut hi: usize, mut used: usize, budget: usize) -> (usize, usize, usize) {
    let mut left_open = lo > 0;
    let mut right_open = hi + 1 < costs.len();
    let mut left_turn = true;
    while left_open || right_open {
        let go_left = (left_turn && left_open) || !right_open;
        if go_left {
            let c = costs[lo - 1];
            if used + c <= budget {
                lo -= 1;
                used += c;
                left_open = lo > 0;
            } else {
                left_open = false;
            }
        } else {
            let c = costs[hi + 1];
            if used + c <= budget {
                hi += 1;
                used += c;
                right_open = hi + 1 < costs.len();
            } else {
                right_open = false;
            }
        }
        left_turn = !go_left;
    }
    (lo, hi, used)
}

/// Aggregate effect of trimming a corpus.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct TrimStats {
    pub n_instances: usize,
    /// Instances that kept fewer units than they started with.
    pub n_trimmed: usize,
    pub n_dropped: usize,
    /// Unit totals over the trimmed instances only.
    pub n_units_before: usize,
    pub n_units_removed: usize,
    /// Percentage of all instances that needed trimming.
    pub pct_instances_trimmed: f64,
    /// Percentage of units removed, over the instances that needed trimming.
    pub pct_units_removed: f64,
}

impl TrimStats {
    /// Contribution of a single trim result.
    pub fn observe(result: &TrimResult) -> TrimStats {
        let mut s = TrimStats {
            n_instances: 1,
            ..Default::default()
        };
        match result {
            TrimResult::Dropped { .. } => s.n_dropped = 1,
            TrimResult::Trimmed { offset_map, .. } if !offset_map.is_identity() => {
                s.n_trimmed = 1;
                s.n_units_before = offset_map.n_original;
                s.n_units_removed = offset_map.removed_units();
            }
            TrimResult::Trimmed { .. } => {}
        }
        s
    }

    pub fn combine(self, other: TrimStats) -> TrimStats {
        TrimStats {
            n_instances: self.n_instances + other.n_instances,
            n_trimmed: self.n_trimmed + other.n_trimmed,
            n_dropped: self.n_dropped + other.n_dropped,
            n_units_before: self.n_units_before + other.n_units_before,
            n_units_removed: self.n_units_removed + other.n_units_removed,
            ..Default::default()
        }
    }

    /// Fills in the percentages from the accumulated counts.
    pub fn finish(mut self) -> TrimStats {
        self.pct_instances_trimmed = percent(self.n_trimmed, self.n_instances);
        self.pct_units_removed = percent(self.n_units_removed, self.n_units_before);
        self
    }
}

fn percent(part: usize, whole: usize) -> f64 {
    if whole == 0 {
        0.0
    } else {
        100.0 * part as f64 / whole as f64
    }
}

pub fn corpus_trim_stats(instances: &[QaInstance], budget_tokens: usize) -> Result<TrimStats> {
    corpus_trim_stats_with(instances, budget_tokens, Exec::default())
}

pub fn corpus_trim_stats_with(instances: &[QaInstance], budget_tokens: usize, exec: Exec) -> Result<TrimStats> {
    if budget_tokens == 0 {
        return Err(Error::InvalidBudget);
    }
    let stats = exec.map_reduce(
        instances,
        |inst| trim(inst, budget_tokens).map(|r| TrimStats::observe(&r)),
        || Ok(TrimStats::default()),
        |a, b| Ok(a?.combine(b?)),
    )?;
    Ok(stats.finish())
}
