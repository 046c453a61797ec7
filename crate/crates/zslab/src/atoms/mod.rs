//! Minimal zero-sum sequences: enumeration, the Davenport constant, and the
//! persistent atom catalog.
//!
//! Atoms are found by a depth-first search over zero-sumfree prefixes in
//! nondecreasing element order. A prefix `S` is closed with the unique
//! candidate `-sigma(S)` whenever that candidate is `>=` the last prefix
//! element, which kills permutation duplicates; minimality of the closed
//! sequence is then re-verified, because closing a zero-sumfree prefix does
//! not by itself guarantee minimality.

pub mod cache;

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::algebra::{GroupSpec, GroupTable, Sequence};
use crate::bitset;

/// Decides whether a sequence is an atom (a minimal zero-sum sequence).
///
/// A nonempty zero-sum sequence is minimal exactly when removing one copy of
/// any fixed supported element leaves a zero-sumfree sequence: a proper
/// zero-sum sub-multiset or its complement always avoids one copy of that
/// element.
pub fn is_atom(s: &Sequence) -> bool {
    if s.is_empty() || s.sigma() != s.group().zero() {
        return false;
    }
    let g = s.support().next().unwrap().clone();
    let one = Sequence::power_of(s.group().clone(), g, 1);
    s.divide(&one).unwrap().is_zero_sumfree()
}

/// The closed-form lower-bound quantity `1 + sum (n_i - 1)` over the
/// invariant factors; equals 1 for the trivial group.
pub fn d_star(spec: &GroupSpec) -> u64 {
    1 + spec.invariant_factors().iter().map(|n| n - 1).sum::<u64>()
}

/// The Davenport constant, computed by exhaustive atom enumeration.
pub fn davenport(spec: &GroupSpec) -> u64 {
    enumerate_atoms(spec, None).max_length()
}

#[derive(Clone, Debug)]
pub struct AtomCatalog {
    group: GroupSpec,
    atoms: Vec<Sequence>,
    by_length: BTreeMap<u64, Vec<usize>>,
    max_length: u64,
    /// Truncation bound; `None` means the enumeration ran to exhaustion.
    bound: Option<u64>,
    /// When set, the catalog holds exactly the atoms dividing this sequence.
    restricted_to: Option<Sequence>,
}

impl AtomCatalog {
    fn build(
        group: GroupSpec,
        mut atoms: Vec<Sequence>,
        bound: Option<u64>,
        restricted_to: Option<Sequence>,
    ) -> Self {
        atoms.sort_unstable();
        atoms.dedup();
        let mut by_length: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
        for (i, a) in atoms.iter().enumerate() {
            by_length.entry(a.len()).or_default().push(i);
        }
        let max_length = atoms.last().map(|a| a.len()).unwrap_or(0);
        AtomCatalog {
            group,
            atoms,
            by_length,
            max_length,
            bound,
            restricted_to,
        }
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn atoms(&self) -> &[Sequence] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atom(&self, idx: usize) -> &Sequence {
        &self.atoms[idx]
    }

    pub fn position(&self, s: &Sequence) -> Option<usize> {
        self.atoms.binary_search(s).ok()
    }

    /// Maximum atom length present in the catalog; for a complete unrestricted
    /// catalog this is the Davenport constant.
    pub fn max_length(&self) -> u64 {
        self.max_length
    }

    /// Whether enumeration ran to exhaustion (within the restriction scope).
    pub fn is_complete(&self) -> bool {
        self.bound.is_none()
    }

    pub fn bound(&self) -> Option<u64> {
        self.bound
    }

    pub fn restriction(&self) -> Option<&Sequence> {
        self.restricted_to.as_ref()
    }

    /// The Davenport constant; only meaningful on a complete unrestricted
    /// catalog.
    pub fn davenport(&self) -> u64 {
        debug_assert!(self.is_complete() && self.restricted_to.is_none());
        self.max_length
    }

    /// Whether this catalog lists every atom dividing `b`.
    pub fn covers(&self, b: &Sequence) -> bool {
        self.group == *b.group()
            && self.is_complete()
            && match &self.restricted_to {
                None => true,
                Some(r) => b.divides(r),
            }
    }

    pub fn indices_of_length(&self, len: u64) -> &[usize] {
        self.by_length.get(&len).map(Vec::as_slice).unwrap_or(&[])
    }

    /// The maximum-length stratum, excluding the atom `0` (relevant only for
    /// the trivial group, where it is the sole atom).
    pub fn max_length_atoms(&self) -> Vec<&Sequence> {
        self.indices_of_length(self.max_length)
            .iter()
            .map(|&i| &self.atoms[i])
            .filter(|a| a.multiplicity(&self.group.zero()) == 0)
            .collect()
    }

    pub fn max_length_atom_indices(&self) -> Vec<usize> {
        self.indices_of_length(self.max_length)
            .iter()
            .copied()
            .filter(|&i| self.atoms[i].multiplicity(&self.group.zero()) == 0)
            .collect()
    }
}

/// Enumerates all atoms of length `<= max_len` (all atoms when `None`).
pub fn enumerate_atoms(spec: &GroupSpec, max_len: Option<u64>) -> AtomCatalog {
    let caps = vec![u64::MAX; spec.order() as usize];
    let atoms = enumerate_with_caps(spec, &caps, max_len);
    AtomCatalog::build(spec.clone(), atoms, max_len, None)
}

/// Enumerates exactly the atoms dividing `b`, by capping every element
/// multiplicity at its multiplicity in `b`. Much cheaper than a full catalog
/// when `b` has small support.
pub fn atoms_dividing(b: &Sequence) -> AtomCatalog {
    let spec = b.group();
    let mut caps = vec![0u64; spec.order() as usize];
    for (g, m) in b.iter() {
        caps[spec.index_of(g)] = m;
    }
    let atoms = enumerate_with_caps(spec, &caps, None);
    AtomCatalog::build(spec.clone(), atoms, None, Some(b.clone()))
}

fn enumerate_with_caps(spec: &GroupSpec, caps: &[u64], max_len: Option<u64>) -> Vec<Sequence> {
    let order = spec.order() as usize;
    let table = GroupTable::new(spec);
    let words = order.div_ceil(64);

    let mut atoms: Vec<Vec<u32>> = Vec::new();
    if caps[0] >= 1 {
        atoms.push(vec![0]); // the sequence `0` is the unique atom containing 0
    }
    if max_len == Some(1) || order == 1 {
        return render(spec, atoms);
    }

    // Independent first-element branches; merged and re-sorted afterwards so
    // the result is deterministic regardless of schedule.
    let firsts: Vec<usize> = (1..order).filter(|&e| caps[e] >= 1).collect();
    let branches: Vec<Vec<Vec<u32>>> = firsts
        .par_iter()
        .map(|&e| {
            let mut out = Vec::new();
            let mut sums = vec![0u64; words];
            bitset::set(&mut sums, e);
            let mut counts = vec![0u64; order];
            counts[e] = 1;
            let mut prefix = vec![e as u32];
            dfs(
                &table,
                caps,
                &mut counts,
                &mut prefix,
                &sums,
                e,
                max_len,
                &mut out,
            );
            out
        })
        .collect();
    atoms.extend(branches.into_iter().flatten());
    render(spec, atoms)
}

#[allow(clippy::too_many_arguments)]
fn dfs(
    table: &GroupTable,
    caps: &[u64],
    counts: &mut [u64],
    prefix: &mut Vec<u32>,
    sums: &[u64],
    sigma: usize,
    max_len: Option<u64>,
    out: &mut Vec<Vec<u32>>,
) {
    let last = *prefix.last().unwrap() as usize;

    // Close with the unique candidate -sigma(prefix); nonzero because the
    // prefix is zero-sumfree.
    let c = table.neg(sigma);
    if c >= last
        && counts[c] < caps[c]
        && max_len.is_none_or(|m| prefix.len() as u64 + 1 <= m)
        && closes_to_atom(table, prefix, c)
    {
        let mut atom = prefix.clone();
        atom.push(c as u32);
        out.push(atom);
    }

    // Extend while keeping room for the closing element.
    if max_len.is_some_and(|m| prefix.len() as u64 + 2 > m) {
        return;
    }
    let words = sums.len();
    for e in last..table.order {
        if counts[e] >= caps[e] {
            continue;
        }
        let mut next = sums.to_vec();
        bitset::set(&mut next, e);
        for i in bitset::ones(sums).collect::<Vec<_>>() {
            bitset::set(&mut next, table.add(i, e));
        }
        if next[0] & 1 != 0 {
            continue; // extension would stop being zero-sumfree
        }
        debug_assert_eq!(next.len(), words);
        counts[e] += 1;
        prefix.push(e as u32);
        dfs(
            table,
            caps,
            counts,
            prefix,
            &next,
            table.add(sigma, e),
            max_len,
            out,
        );
        prefix.pop();
        counts[e] -= 1;
    }
}

/// Minimality of `prefix + c`: dropping one copy of the smallest element must
/// leave a zero-sumfree sequence.
fn closes_to_atom(table: &GroupTable, prefix: &[u32], c: usize) -> bool {
    let words = table.order.div_ceil(64);
    let mut reach = vec![0u64; words];
    let extend = |reach: &mut Vec<u64>, e: usize| -> bool {
        let snapshot = reach.clone();
        bitset::set(reach, e);
        for i in bitset::ones(&snapshot) {
            bitset::set(reach, table.add(i, e));
        }
        reach[0] & 1 == 0
    };
    for &e in &prefix[1..] {
        if !extend(&mut reach, e as usize) {
            return false;
        }
    }
    extend(&mut reach, c)
}

fn render(spec: &GroupSpec, atoms: Vec<Vec<u32>>) -> Vec<Sequence> {
    atoms
        .into_iter()
        .map(|idxs| {
            Sequence::from_elements(
                spec.clone(),
                idxs.into_iter().map(|i| spec.element_at(i as usize)),
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::GroupMap;
    use std::collections::BTreeSet;

    fn seq(group: &GroupSpec, text: &str) -> Sequence {
        Sequence::parse(group, text).unwrap()
    }

    /// Naive generate-and-filter reference: every multiset over G of length
    /// up to `max_len`, kept when zero-sum and no proper nonempty
    /// sub-multiset sums to zero.
    fn naive_atoms(spec: &GroupSpec, max_len: u64) -> BTreeSet<Sequence> {
        let els = spec.elements();
        let mut out = BTreeSet::new();
        let mut stack: Vec<Vec<usize>> = vec![vec![]];
        while let Some(cur) = stack.pop() {
            if !cur.is_empty() {
                let s = Sequence::from_elements(
                    spec.clone(),
                    cur.iter().map(|&i| els[i].clone()),
                );
                if s.sigma() == spec.zero() && naive_minimal(&s) {
                    out.insert(s);
                }
            }
            if (cur.len() as u64) < max_len {
                let start = cur.last().copied().unwrap_or(0);
                for i in start..els.len() {
                    let mut next = cur.clone();
                    next.push(i);
                    stack.push(next);
                }
            }
        }
        out
    }

    fn naive_minimal(s: &Sequence) -> bool {
        let items: Vec<(GroupElement, u64)> = s.iter().map(|(g, m)| (g.clone(), m)).collect();
        let spec = s.group().clone();
        let total = s.len();
        let mut take = vec![0u64; items.len()];
        loop {
            // advance the mixed-radix counter over sub-multisets
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
                continue;
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

    use crate::algebra::GroupElement;

    #[test]
    fn is_atom_examples() {
        let c3 = GroupSpec::parse("C3").unwrap();
        assert!(is_atom(&seq(&c3, "1^3")));
        let c4 = GroupSpec::parse("C4").unwrap();
        assert!(is_atom(&seq(&c4, "1^2+2")));
        assert!(!is_atom(&seq(&c4, "1^2+2^2")));
        assert!(is_atom(&seq(&c4, "0")));
        assert!(!is_atom(&seq(&c4, "0^2")));
        assert!(!is_atom(&Sequence::empty(c4)));
    }

    #[test]
    fn small_catalogs_match_spelled_out_atoms() {
        let c3 = GroupSpec::parse("C3").unwrap();
        let cat = enumerate_atoms(&c3, None);
        let rendered: Vec<String> = cat.atoms().iter().map(|a| a.render()).collect();
        assert_eq!(rendered, vec!["0", "1+2", "1^3", "2^3"]);

        let c4 = GroupSpec::parse("C4").unwrap();
        let cat = enumerate_atoms(&c4, None);
        let rendered: Vec<String> = cat.atoms().iter().map(|a| a.render()).collect();
        assert_eq!(
            rendered,
            vec!["0", "1+3", "2^2", "1^2+2", "2+3^2", "1^4", "3^4"]
        );

        let v4 = GroupSpec::parse("C2xC2").unwrap();
        let cat = enumerate_atoms(&v4, None);
        let rendered: Vec<String> = cat.atoms().iter().map(|a| a.render()).collect();
        assert_eq!(
            rendered,
            vec!["0,0", "0,1^2", "1,0^2", "1,1^2", "0,1+1,0+1,1"]
        );
    }

    #[test]
    fn catalogs_match_naive_oracle() {
        for name in ["C2", "C3", "C4", "C5", "C6", "C2xC2", "C1"] {
            let spec = GroupSpec::parse(name).unwrap();
            let got: BTreeSet<Sequence> =
                enumerate_atoms(&spec, None).atoms().iter().cloned().collect();
            let bound = got.iter().map(|a| a.len()).max().unwrap_or(1) + 1;
            let want = naive_atoms(&spec, bound);
            assert_eq!(got, want, "catalog mismatch over {name}");
        }
    }

    #[test]
    fn davenport_values() {
        for (name, d) in [
            ("C1", 1),
            ("C2", 2),
            ("C3", 3),
            ("C6", 6),
            ("C2xC2", 3),
            ("C3xC3", 5),
            ("C2xC2xC4", 6),
        ] {
            let spec = GroupSpec::parse(name).unwrap();
            assert_eq!(davenport(&spec), d, "davenport of {name}");
            assert!(d_star(&spec) <= d);
        }
        assert_eq!(d_star(&GroupSpec::parse("C6").unwrap()), 6);
        assert_eq!(d_star(&GroupSpec::parse("C2xC2xC4").unwrap()), 6);
        assert_eq!(d_star(&GroupSpec::parse("C1").unwrap()), 1);
    }

    #[test]
    fn max_length_stratum() {
        let c4 = GroupSpec::parse("C4").unwrap();
        let cat = enumerate_atoms(&c4, None);
        let stratum: Vec<String> = cat.max_length_atoms().iter().map(|a| a.render()).collect();
        assert_eq!(stratum, vec!["1^4", "3^4"]);

        // For cyclic groups the stratum is exactly the g^n over generators.
        for n in 2..=12u64 {
            let spec = GroupSpec::parse(&format!("C{n}")).unwrap();
            let cat = enumerate_atoms(&spec, None);
            let got: BTreeSet<Sequence> =
                cat.max_length_atoms().into_iter().cloned().collect();
            let want: BTreeSet<Sequence> = spec
                .generators()
                .into_iter()
                .map(|g| Sequence::power_of(spec.clone(), g, n))
                .collect();
            assert_eq!(got, want, "max-length stratum over C{n}");
        }
    }

    #[test]
    fn truncated_catalog() {
        let c4 = GroupSpec::parse("C4").unwrap();
        let cat = enumerate_atoms(&c4, Some(2));
        let rendered: Vec<String> = cat.atoms().iter().map(|a| a.render()).collect();
        assert_eq!(rendered, vec!["0", "1+3", "2^2"]);
        assert!(!cat.is_complete());
    }

    #[test]
    fn restricted_catalog_lists_exactly_the_dividing_atoms() {
        let c4 = GroupSpec::parse("C4").unwrap();
        let b = seq(&c4, "1^4+3^4");
        let cat = atoms_dividing(&b);
        let rendered: Vec<String> = cat.atoms().iter().map(|a| a.render()).collect();
        assert_eq!(rendered, vec!["1+3", "1^4", "3^4"]);
        assert!(cat.covers(&b));
        assert!(cat.covers(&seq(&c4, "1+3")));
        assert!(!cat.covers(&seq(&c4, "2^2")));

        let full = enumerate_atoms(&c4, None);
        let expect: Vec<&Sequence> =
            full.atoms().iter().filter(|a| a.divides(&b)).collect();
        assert_eq!(cat.atoms().iter().collect::<Vec<_>>(), expect);
    }

    #[test]
    fn atom_sets_closed_under_negation_and_automorphisms() {
        for name in ["C5", "C2xC4", "C3xC3"] {
            let spec = GroupSpec::parse(name).unwrap();
            let cat = enumerate_atoms(&spec, None);
            let set: BTreeSet<Sequence> = cat.atoms().iter().cloned().collect();
            for a in cat.atoms() {
                assert!(set.contains(&a.negate()), "negation closure over {name}");
            }
            for phi in GroupMap::automorphisms(&spec) {
                for a in cat.atoms() {
                    let image = phi.apply_sequence(a).unwrap();
                    assert!(set.contains(&image), "automorphism closure over {name}");
                }
            }
        }
    }

    #[test]
    fn deleting_any_element_of_an_atom_leaves_zero_sumfree() {
        let spec = GroupSpec::parse("C2xC4").unwrap();
        let cat = enumerate_atoms(&spec, None);
        for a in cat.atoms() {
            for g in a.support() {
                let rest = a
                    .divide(&Sequence::power_of(spec.clone(), g.clone(), 1))
                    .unwrap();
                assert!(rest.is_zero_sumfree());
            }
        }
    }

    #[test]
    fn trivial_group_has_the_single_zero_atom() {
        let c1 = GroupSpec::parse("C1").unwrap();
        let cat = enumerate_atoms(&c1, None);
        let rendered: Vec<String> = cat.atoms().iter().map(|a| a.render()).collect();
        assert_eq!(rendered, vec!["0"]);
        assert_eq!(cat.max_length(), 1);
        assert!(cat.max_length_atoms().is_empty());
    }
}
