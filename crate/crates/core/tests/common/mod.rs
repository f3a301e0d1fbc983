//! Brute-force oracles and generators shared by the integration tests.
//!
//! Nothing here calls into the implementation paths it is used to check:
//! answers are compared as explicit unit sets or span lists built by
//! straightforward enumeration.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};
use std::path::PathBuf;

use idxqa::{AnswerSet, Span};
use rand::Rng;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn pairs(a: &AnswerSet) -> Vec<(usize, usize)> {
    a.spans().iter().map(|s| (s.start(), s.end())).collect()
}

pub fn answer(spans: &[(usize, usize)], n: usize) -> AnswerSet {
    AnswerSet::new(spans.iter().map(|&(s, e)| Span::new(s, e).unwrap()), n).unwrap()
}

/// Maximal runs of consecutive integers in a sorted set.
pub fn runs(units: &BTreeSet<usize>) -> Vec<(usize, usize)> {
    let mut out: Vec<(usize, usize)> = Vec::new();
    for &u in units {
        if let Some(last) = out.last_mut() {
            if last.1 + 1 == u {
                last.1 = u;
                continue;
            }
        }
        out.push((u, u));
    }
    out
}

/// Full-index repair by definition: shift, keep in-range values, set-ify.
pub fn fi_oracle(values: &[i64], n_units: usize, offset: i64) -> Vec<(usize, usize)> {
    let set: BTreeSet<usize> = values
        .iter()
        .map(|&v| v as i128 - offset as i128)
        .filter(|&v| v >= 0 && v < n_units as i128)
        .map(|v| v as usize)
        .collect();
    runs(&set)
}

/// Connected components of the overlap graph, each replaced by its hull.
pub fn merge_oracle(raw: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let n = raw.len();
    let mut comp: Vec<usize> = (0..n).collect();
    loop {
        let mut changed = false;
        for i in 0..n {
            for j in 0..n {
                let (a, b) = (raw[i], raw[j]);
                if a.0 <= b.1 && b.0 <= a.1 && comp[i] != comp[j] {
                    let c = comp[i].min(comp[j]);
                    comp[i] = c;
                    comp[j] = c;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let labels: BTreeSet<usize> = comp.iter().copied().collect();
    let mut hulls: Vec<(usize, usize)> = labels
        .into_iter()
        .map(|c| {
            let members: Vec<usize> = (0..n).filter(|&i| comp[i] == c).collect();
            let lo = members.iter().map(|&i| raw[i].0).min().unwrap();
            let hi = members.iter().map(|&i| raw[i].1).max().unwrap();
            (lo, hi)
        })
        .collect();
    hulls.sort();
    hulls
}

/// Span-index repair by definition: drop a trailing odd value, pair in
/// order, keep ordered in-range pairs, merge overlaps.
pub fn si_oracle(values: &[i64], n_units: usize, offset: i64) -> Vec<(usize, usize)> {
    let shifted: Vec<i128> = values.iter().map(|&v| v as i128 - offset as i128).collect();
    let even = shifted.len() / 2 * 2;
    let mut kept = Vec::new();
    for k in (0..even).step_by(2) {
        let (s, e) = (shifted[k], shifted[k + 1]);
        if s <= e && s >= 0 && e < n_units as i128 {
            kept.push((s as usize, e as usize));
        }
    }
    merge_oracle(&kept)
}

pub fn unit_set(spans: &[(usize, usize)]) -> HashSet<usize> {
    let mut set = HashSet::new();
    for &(s, e) in spans {
        for u in s..=e {
            set.insert(u);
        }
    }
    set
}

/// (precision, recall, f1) from credits with the empty-side conventions.
pub fn prf_from(p_credit: f64, p_total: f64, r_credit: f64, r_total: f64) -> (f64, f64, f64) {
    if p_total == 0.0 && r_total == 0.0 {
        return (1.0, 1.0, 1.0);
    }
    if p_total == 0.0 || r_total == 0.0 {
        return (0.0, 0.0, 0.0);
    }
    let p = p_credit / p_total;
    let r = r_credit / r_total;
    let f = if p + r == 0.0 { 0.0 } else { 2.0 * p * r / (p + r) };
    (p, r, f)
}

pub fn unit_oracle(pred: &[(usize, usize)], gold: &[(usize, usize)]) -> (f64, f64, f64) {
    let p = unit_set(pred);
    let g = unit_set(gold);
    let shared = p.intersection(&g).count() as f64;
    prf_from(shared, p.len() as f64, shared, g.len() as f64)
}

pub fn em_oracle(pred: &[(usize, usize)], gold: &[(usize, usize)]) -> (f64, f64, f64) {
    let p_hit = pred.iter().filter(|p| gold.iter().any(|g| g == *p)).count() as f64;
    let g_hit = gold.iter().filter(|g| pred.iter().any(|p| p == *g)).count() as f64;
    prf_from(p_hit, pred.len() as f64, g_hit, gold.len() as f64)
}

pub fn pm_oracle(pred: &[(usize, usize)], gold: &[(usize, usize)]) -> (f64, f64, f64) {
    let overlap = |a: (usize, usize), b: (usize, usize)| (a.0..=a.1).filter(|u| (b.0..=b.1).contains(u)).count() as f64;
    let credit = |from: &[(usize, usize)], against: &[(usize, usize)]| -> f64 {
        from.iter()
            .map(|&a| {
                let best = against.iter().map(|&b| overlap(a, b)).fold(0.0, f64::max);
                best / (a.1 - a.0 + 1) as f64
            })
            .sum()
    };
    prf_from(
        credit(pred, gold),
        pred.len() as f64,
        credit(gold, pred),
        gold.len() as f64,
    )
}

/// Random indicator mask of length `n` whose density varies per call.
pub fn random_mask<R: Rng>(rng: &mut R, n: usize) -> Vec<bool> {
    let density = [0.02, 0.05, 0.1, 0.25, 0.5][rng.gen_range(0..5)];
    (0..n).map(|_| rng.gen_bool(density)).collect()
}

/// Canonical answer built directly from a mask, without the library.
pub fn mask_runs(mask: &[bool]) -> Vec<(usize, usize)> {
    let set: BTreeSet<usize> = mask.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect();
    runs(&set)
}

pub fn is_canonical(a: &AnswerSet) -> bool {
    let p = pairs(a);
    p.iter().all(|&(s, e)| s <= e && e < a.n_units()) && p.windows(2).all(|w| w[0].1 < w[1].0)
}
