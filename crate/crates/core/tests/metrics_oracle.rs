mod common;

use common::{em_oracle, pairs, pm_oracle, unit_oracle};
use idxqa::metrics::evaluate_corpus_with;
use idxqa::{em_prf, mask_to_spans, pm_prf, unit_prf, Aggregation, AnswerSet, Exec, Prf, Regime, Span};
use proptest::prelude::*;

type Metric = fn(&AnswerSet, &AnswerSet) -> idxqa::Result<Prf>;
type Oracle = fn(&[(usize, usize)], &[(usize, usize)]) -> (f64, f64, f64);

const REGIMES: [(Metric, Oracle); 3] = [(unit_prf, unit_oracle), (em_prf, em_oracle), (pm_prf, pm_oracle)];

/// Canonical answer sets, including adjacent spans, over `n` units.
fn answer_sets(n: usize) -> impl Strategy<Value = AnswerSet> {
    prop::collection::vec((0..n, 0..4usize), 0..6).prop_map(move |raw| {
        let spans = raw
            .into_iter()
            .map(|(s, len)| Span::new(s, (s + len).min(n - 1)).unwrap());
        AnswerSet::new(spans, n).unwrap()
    })
}

fn pair_of_sets() -> impl Strategy<Value = (AnswerSet, AnswerSet)> {
    (1usize..=30).prop_flat_map(|n| (answer_sets(n), answer_sets(n)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn metrics_match_enumeration_oracles((pred, gold) in pair_of_sets()) {
        for (metric, oracle) in REGIMES {
            let got = metric(&pred, &gold).unwrap();
            let (p, r, f) = oracle(&pairs(&pred), &pairs(&gold));
            prop_assert!((got.precision - p).abs() < 1e-9);
            prop_assert!((got.recall - r).abs() < 1e-9);
            prop_assert!((got.f1 - f).abs() < 1e-9);
        }
    }

    #[test]
    fn swapping_sides_swaps_precision_and_recall((pred, gold) in pair_of_sets()) {
        for (metric, _) in REGIMES {
            let a = metric(&pred, &gold).unwrap();
            let b = metric(&gold, &pred).unwrap();
            prop_assert_eq!(a.precision, b.recall);
            prop_assert_eq!(a.recall, b.precision);
        }
    }

    #[test]
    fn identical_sets_score_perfectly(gold in (1usize..=30).prop_flat_map(answer_sets)) {
        for (metric, _) in REGIMES {
            prop_assert_eq!(metric(&gold, &gold).unwrap(), Prf::perfect());
        }
    }

    #[test]
    fn input_order_is_irrelevant(
        mask in prop::collection::vec(any::<bool>(), 1..30),
        other in prop::collection::vec(any::<bool>(), 1..30),
    ) {
        let n = mask.len().min(other.len());
        let pred = mask_to_spans(&mask[..n]);
        let gold = mask_to_spans(&other[..n]);
        let reversed = AnswerSet::new(pred.spans().iter().rev().copied(), n).unwrap();
        for (metric, _) in REGIMES {
            prop_assert_eq!(metric(&pred, &gold).unwrap(), metric(&reversed, &gold).unwrap());
        }
    }
}

#[test]
fn micro_pooling_matches_hand_tally() {
    let sets: Vec<(AnswerSet, AnswerSet, String)> = (0..200)
        .map(|i| {
            let n = 10 + i % 7;
            let pred = common::answer(&[(i % 5, i % 5 + 1), (7, 8)], n);
            let gold = common::answer(&[(i % 3, i % 3 + 2)], n);
            (pred, gold, format!("q{i}"))
        })
        .collect();
    let pairs_ref: Vec<_> = sets.iter().map(|(p, g, id)| (p, g, id.as_str())).collect();

    let (mut hit, mut np, mut ng) = (0.0, 0.0, 0.0);
    for (p, g, _) in &sets {
        let (pp, gg) = (pairs(p), pairs(g));
        hit += pp.iter().filter(|s| gg.contains(s)).count() as f64;
        np += pp.len() as f64;
        ng += gg.len() as f64;
    }
    for exec in [Exec::Sequential, Exec::Parallel] {
        let r = evaluate_corpus_with(&pairs_ref, Regime::ExactMatch, Aggregation::MicroOverSpans, exec).unwrap();
        assert!((r.aggregate.precision - hit / np).abs() < 1e-12);
        assert!((r.aggregate.recall - hit / ng).abs() < 1e-12);
        assert_eq!(r.per_instance.len(), 200);
        assert_eq!(r.per_instance[17].id, "q17");
    }
}
