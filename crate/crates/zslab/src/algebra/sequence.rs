//! Sequences (finite multisets) over a finite abelian group.
//!
//! A sequence is stored sparsely as multiplicities keyed by element in the
//! canonical element order, so equality is structural and rendering is
//! deterministic. Text form: `+`-joined terms `<coords>^<mult>` with `^1`
//! omitted, e.g. `1^2+2` over `C4`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use serde::{Serialize, Serializer};

use super::group::{GroupElement, GroupSpec};
use super::AlgebraError;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Sequence {
    group: GroupSpec,
    counts: BTreeMap<GroupElement, u64>,
}

/// Classification flags for a sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SequenceFlags {
    pub is_empty: bool,
    /// The sum is zero. The empty sequence is the monoid identity and
    /// reports `true` here together with `is_empty`.
    pub is_zero_sum: bool,
    /// No nonempty sub-multiset sums to zero.
    pub is_zero_sumfree: bool,
    /// Every element occurs at most once.
    pub is_squarefree: bool,
}

impl Sequence {
    pub fn empty(group: GroupSpec) -> Self {
        Sequence {
            group,
            counts: BTreeMap::new(),
        }
    }

    pub fn from_counts<I>(group: GroupSpec, counts: I) -> Self
    where
        I: IntoIterator<Item = (GroupElement, u64)>,
    {
        let mut map = BTreeMap::new();
        for (g, m) in counts {
            debug_assert!(group.contains(&g));
            if m > 0 {
                *map.entry(g).or_insert(0) += m;
            }
        }
        Sequence {
            group,
            counts: map,
        }
    }

    pub fn from_elements<I>(group: GroupSpec, elements: I) -> Self
    where
        I: IntoIterator<Item = GroupElement>,
    {
        Self::from_counts(group, elements.into_iter().map(|g| (g, 1)))
    }

    /// The sequence `g^m`.
    pub fn power_of(group: GroupSpec, g: GroupElement, m: u64) -> Self {
        Self::from_counts(group, [(g, m)])
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    /// Total length `|S|`.
    pub fn len(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Multiplicity `v_g(S)`.
    pub fn multiplicity(&self, g: &GroupElement) -> u64 {
        self.counts.get(g).copied().unwrap_or(0)
    }

    /// Iterates `(element, multiplicity)` in canonical element order.
    pub fn iter(&self) -> impl Iterator<Item = (&GroupElement, u64)> {
        self.counts.iter().map(|(g, &m)| (g, m))
    }

    pub fn support(&self) -> impl Iterator<Item = &GroupElement> {
        self.counts.keys()
    }

    pub fn support_size(&self) -> usize {
        self.counts.len()
    }

    /// The sum of the sequence.
    pub fn sigma(&self) -> GroupElement {
        let mut acc = self.group.zero();
        for (g, m) in self.iter() {
            acc = self.group.add(&acc, &self.group.scalar_mul(m, g));
        }
        acc
    }

    /// Multiset union, the product in the free abelian monoid.
    ///
    /// Panics if the operands live over different groups.
    pub fn product(&self, other: &Sequence) -> Sequence {
        assert_eq!(self.group, other.group, "sequence product across groups");
        let mut counts = self.counts.clone();
        for (g, m) in other.iter() {
            *counts.entry(g.clone()).or_insert(0) += m;
        }
        Sequence {
            group: self.group.clone(),
            counts,
        }
    }

    /// `self^k` in the free abelian monoid.
    pub fn pow(&self, k: u64) -> Sequence {
        if k == 0 {
            return Sequence::empty(self.group.clone());
        }
        let counts = self
            .counts
            .iter()
            .map(|(g, m)| (g.clone(), m * k))
            .collect();
        Sequence {
            group: self.group.clone(),
            counts,
        }
    }

    /// Whether `self` divides `b` in the free abelian monoid.
    pub fn divides(&self, b: &Sequence) -> bool {
        self.group == b.group && self.iter().all(|(g, m)| m <= b.multiplicity(g))
    }

    /// The quotient `self / a`, defined when `a` divides `self`.
    pub fn divide(&self, a: &Sequence) -> Result<Sequence, AlgebraError> {
        if self.group != a.group {
            return Err(AlgebraError::GroupMismatch);
        }
        let mut counts = self.counts.clone();
        for (g, m) in a.iter() {
            match counts.get_mut(g) {
                Some(v) if *v > m => *v -= m,
                Some(v) if *v == m => {
                    counts.remove(g);
                }
                _ => return Err(AlgebraError::NotADivisor),
            }
        }
        Ok(Sequence {
            group: self.group.clone(),
            counts,
        })
    }

    /// The sequence `-S`, replacing every element by its inverse.
    pub fn negate(&self) -> Sequence {
        let counts = self
            .counts
            .iter()
            .map(|(g, &m)| (self.group.neg(g), m))
            .collect();
        Sequence {
            group: self.group.clone(),
            counts,
        }
    }

    /// The set of sums attainable by nonempty sub-multisets, computed by a
    /// closure over group elements rather than by enumerating the up to
    /// `2^|S|` subsets: each element copy either extends an existing sum or
    /// starts a new one, so the state is a subset of `G`.
    pub fn subset_sums(&self) -> Vec<GroupElement> {
        let order = self.group.order() as usize;
        let words = order.div_ceil(64);
        let mut reach = vec![0u64; words];
        for (g, m) in self.iter() {
            let gi = self.group.index_of(g);
            for _ in 0..m {
                let mut next = reach.clone();
                // translate reach ∪ {0} by g
                set_bit(&mut next, translate(&self.group, 0, gi));
                for i in iter_bits(&reach, order) {
                    set_bit(&mut next, translate(&self.group, i, gi));
                }
                if next == reach {
                    break; // closure reached, more copies change nothing
                }
                reach = next;
            }
        }
        iter_bits(&reach, order)
            .map(|i| self.group.element_at(i))
            .collect()
    }

    /// Decides the zero-sumfree property via [`subset_sums`](Self::subset_sums).
    pub fn is_zero_sumfree(&self) -> bool {
        let order = self.group.order() as usize;
        let words = order.div_ceil(64);
        let mut reach = vec![0u64; words];
        for (g, m) in self.iter() {
            let gi = self.group.index_of(g);
            for _ in 0..m {
                let mut next = reach.clone();
                set_bit(&mut next, translate(&self.group, 0, gi));
                for i in iter_bits(&reach, order) {
                    set_bit(&mut next, translate(&self.group, i, gi));
                }
                if next[0] & 1 != 0 {
                    return false; // index 0 is the zero element
                }
                if next == reach {
                    break;
                }
                reach = next;
            }
        }
        true
    }

    pub fn classify(&self) -> SequenceFlags {
        SequenceFlags {
            is_empty: self.is_empty(),
            is_zero_sum: self.sigma() == self.group.zero(),
            is_zero_sumfree: self.is_zero_sumfree(),
            is_squarefree: self.len() == self.support_size() as u64,
        }
    }

    /// Renders the text form, e.g. `1^2+2` over `C4`; the empty sequence
    /// renders as the empty string.
    pub fn render(&self) -> String {
        self.counts
            .iter()
            .map(|(g, &m)| {
                let el = self.group.render_element(g);
                if m == 1 {
                    el
                } else {
                    format!("{el}^{m}")
                }
            })
            .collect::<Vec<_>>()
            .join("+")
    }

    /// Parses the text form produced by [`render`](Self::render).
    pub fn parse(group: &GroupSpec, text: &str) -> Result<Sequence, AlgebraError> {
        let text = text.trim();
        if text.is_empty() {
            return Ok(Sequence::empty(group.clone()));
        }
        let mut counts: BTreeMap<GroupElement, u64> = BTreeMap::new();
        for term in text.split('+') {
            let term = term.trim();
            let (el_text, mult) = match term.rsplit_once('^') {
                Some((el, m)) => {
                    let m: u64 = m
                        .trim()
                        .parse()
                        .map_err(|_| AlgebraError::Parse(format!("bad multiplicity in `{term}`")))?;
                    if m == 0 {
                        return Err(AlgebraError::Parse(format!(
                            "zero multiplicity in `{term}`"
                        )));
                    }
                    (el, m)
                }
                None => (term, 1),
            };
            let g = group.parse_element(el_text)?;
            *counts.entry(g).or_insert(0) += mult;
        }
        Ok(Sequence {
            group: group.clone(),
            counts,
        })
    }
}

/// Canonical order: shorter sequences first, then lexicographic on the
/// flattened element list. This is the order used in atom catalogs and all
/// deterministic output.
impl Ord for Sequence {
    fn cmp(&self, other: &Self) -> Ordering {
        self.group
            .cmp(&other.group)
            .then_with(|| self.len().cmp(&other.len()))
            .then_with(|| {
                let mut a = self.counts.iter();
                let mut b = other.counts.iter();
                let (mut ra, mut rb) = (a.next(), b.next());
                loop {
                    match (ra, rb) {
                        (None, None) => return Ordering::Equal,
                        (None, Some(_)) => return Ordering::Less,
                        (Some(_), None) => return Ordering::Greater,
                        (Some((ga, &ma)), Some((gb, &mb))) => {
                            match ga.cmp(gb) {
                                Ordering::Equal => {}
                                // The flattened list with the smaller element
                                // repeated is lexicographically smaller.
                                ord => return ord,
                            }
                            match ma.cmp(&mb) {
                                Ordering::Equal => {
                                    ra = a.next();
                                    rb = b.next();
                                }
                                // the side with fewer copies runs out first;
                                // the flattened comparison continues with its
                                // next (strictly larger) element
                                Ordering::Less => {
                                    return match a.next() {
                                        None => Ordering::Less,
                                        Some((gn, _)) => gn.cmp(gb),
                                    };
                                }
                                Ordering::Greater => {
                                    return match b.next() {
                                        None => Ordering::Greater,
                                        Some((gn, _)) => ga.cmp(gn),
                                    };
                                }
                            }
                        }
                    }
                }
            })
    }
}

impl PartialOrd for Sequence {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Sequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl Serialize for Sequence {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.render())
    }
}

#[inline]
fn set_bit(words: &mut [u64], i: usize) {
    words[i / 64] |= 1u64 << (i % 64);
}

fn iter_bits(words: &[u64], order: usize) -> impl Iterator<Item = usize> + '_ {
    (0..order).filter(move |&i| words[i / 64] >> (i % 64) & 1 != 0)
}

#[inline]
fn translate(group: &GroupSpec, i: usize, j: usize) -> usize {
    group.index_of(&group.add(&group.element_at(i), &group.element_at(j)))
}
