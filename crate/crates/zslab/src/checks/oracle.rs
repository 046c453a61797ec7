//! Reference implementations used as independent cross-checks: plain
//! generate-and-filter enumeration with no pruning, kept deliberately
//! separate from the production search paths.

use std::collections::BTreeSet;

use crate::algebra::{GroupElement, GroupSpec, Sequence};

/// Every multiset over the group of cardinality at most `max_card`,
/// including the empty one.
pub fn multisets(spec: &GroupSpec, max_card: u64) -> Vec<Sequence> {
    let els = spec.elements();
    let mut out = Vec::new();
    let mut counts: Vec<(GroupElement, u64)> = Vec::new();
    fn rec(
        spec: &GroupSpec,
        els: &[GroupElement],
        i: usize,
        left: u64,
        counts: &mut Vec<(GroupElement, u64)>,
        out: &mut Vec<Sequence>,
    ) {
        if i == els.len() {
            out.push(Sequence::from_counts(spec.clone(), counts.iter().cloned()));
            return;
        }
        for take in 0..=left {
            if take > 0 {
                counts.push((els[i].clone(), take));
            }
            rec(spec, els, i + 1, left - take, counts, out);
            if take > 0 {
                counts.pop();
            }
        }
    }
    rec(spec, &els, 0, max_card, &mut counts, &mut out);
    out
}

/// Every zero-sum sequence of cardinality at most `max_card`, the empty
/// sequence included.
pub fn zero_sum_sequences(spec: &GroupSpec, max_card: u64) -> Vec<Sequence> {
    multisets(spec, max_card)
        .into_iter()
        .filter(|s| s.sigma() == spec.zero())
        .collect()
}

/// Naive atom oracle: zero-sum sequences of length at most `max_len` with no
/// proper nonempty zero-sum sub-multiset, the latter decided by enumerating
/// every sub-multiset directly.
pub fn naive_atoms(spec: &GroupSpec, max_len: u64) -> BTreeSet<Sequence> {
    zero_sum_sequences(spec, max_len)
        .into_iter()
        .filter(|s| !s.is_empty() && is_minimal(s))
        .collect()
}

/// Direct minimality check over all sub-multisets.
pub fn is_minimal(s: &Sequence) -> bool {
    let spec = s.group().clone();
    let items: Vec<(GroupElement, u64)> = s.iter().map(|(g, m)| (g.clone(), m)).collect();
    let total = s.len();
    let mut take = vec![0u64; items.len()];
    loop {
        let mut i = 0;
        loop {
            if i == items.len() {
                return true;
            }
            if take[i] < items[i].1 {
                take[i] += 1;
                break;
            }
            take[i] = 0;
            i += 1;
        }
        let chosen: u64 = take.iter().sum();
        if chosen == total {
            continue; // not a proper sub-multiset
        }
        let mut sum = spec.zero();
        for ((g, _), &t) in items.iter().zip(&take) {
            sum = spec.add(&sum, &spec.scalar_mul(t, g));
        }
        if sum == spec.zero() {
            return false;
        }
    }
}
