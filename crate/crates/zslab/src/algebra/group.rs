//! Finite abelian groups in invariant-factor form.
//!
//! A group is described by its invariant factors `(n_1, ..., n_r)` with
//! `1 < n_1 | n_2 | ... | n_r`; the trivial group has `r = 0`. Elements are
//! coordinate vectors of residues, one residue per factor, compared in
//! lexicographic order. All arithmetic is exact.

use std::fmt;

use num_integer::Integer;
use serde::{Serialize, Serializer};

use super::AlgebraError;

/// A finite abelian group `C_{n_1} x ... x C_{n_r}` in invariant-factor form.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupSpec {
    factors: Vec<u64>,
}

/// An element of a [`GroupSpec`], stored as canonical residues `0 <= c_i < n_i`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupElement {
    coords: Vec<u64>,
}

impl GroupSpec {
    /// Builds a group directly from cyclic orders, regrouping into
    /// invariant-factor normal form. Orders equal to 1 are dropped.
    pub fn from_orders(orders: &[u64]) -> Result<Self, AlgebraError> {
        if orders.iter().any(|&n| n == 0) {
            return Err(AlgebraError::Parse("cyclic order must be positive".into()));
        }
        // Split every order into prime powers (elementary divisors), then
        // rebuild the divisibility chain by taking, for each prime, the
        // largest remaining power into the largest invariant factor.
        let mut by_prime: Vec<(u64, Vec<u32>)> = Vec::new();
        for &n in orders {
            for (p, e) in prime_factorize(n) {
                match by_prime.iter_mut().find(|(q, _)| *q == p) {
                    Some((_, exps)) => exps.push(e),
                    None => by_prime.push((p, vec![e])),
                }
            }
        }
        for (_, exps) in by_prime.iter_mut() {
            exps.sort_unstable_by(|a, b| b.cmp(a));
        }
        let rank = by_prime.iter().map(|(_, e)| e.len()).max().unwrap_or(0);
        let mut factors = Vec::with_capacity(rank);
        for i in 0..rank {
            let mut f: u64 = 1;
            for (p, exps) in &by_prime {
                if let Some(&e) = exps.get(i) {
                    f = f
                        .checked_mul(p.checked_pow(e).ok_or_else(overflow)?)
                        .ok_or_else(overflow)?;
                }
            }
            factors.push(f);
        }
        factors.reverse(); // ascending, n_1 | n_2 | ... | n_r
        Ok(GroupSpec { factors })
    }

    /// Parses a group string such as `C6` or `C2xC2xC4` (case-insensitive `C`)
    /// and returns the invariant-factor normal form, so `C2xC3` parses to `C6`.
    pub fn parse(text: &str) -> Result<Self, AlgebraError> {
        let mut orders = Vec::new();
        for part in text.split(['x', 'X']) {
            let part = part.trim();
            let digits = part
                .strip_prefix(['C', 'c'])
                .ok_or_else(|| AlgebraError::Parse(format!("expected C<n>, got `{part}`")))?;
            if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                return Err(AlgebraError::Parse(format!("expected C<n>, got `{part}`")));
            }
            let n: u64 = digits
                .parse()
                .map_err(|_| AlgebraError::Parse(format!("order out of range in `{part}`")))?;
            if n == 0 {
                return Err(AlgebraError::Parse("cyclic order must be positive".into()));
            }
            orders.push(n);
        }
        Self::from_orders(&orders)
    }

    /// Canonical rendering, e.g. `C2xC2xC4`; the trivial group renders as `C1`.
    pub fn canonical_name(&self) -> String {
        if self.factors.is_empty() {
            return "C1".to_string();
        }
        self.factors
            .iter()
            .map(|n| format!("C{n}"))
            .collect::<Vec<_>>()
            .join("x")
    }

    pub fn invariant_factors(&self) -> &[u64] {
        &self.factors
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn order(&self) -> u64 {
        self.factors.iter().product()
    }

    pub fn exponent(&self) -> u64 {
        self.factors.last().copied().unwrap_or(1)
    }

    pub fn is_trivial(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn is_cyclic(&self) -> bool {
        self.factors.len() <= 1
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement {
            coords: vec![0; self.factors.len()],
        }
    }

    /// Builds an element from coordinates, which must already be reduced.
    pub fn element(&self, coords: Vec<u64>) -> Result<GroupElement, AlgebraError> {
        if coords.len() != self.factors.len() {
            return Err(AlgebraError::Parse(format!(
                "expected {} coordinates, got {}",
                self.factors.len(),
                coords.len()
            )));
        }
        for (c, n) in coords.iter().zip(&self.factors) {
            if c >= n {
                return Err(AlgebraError::Parse(format!(
                    "coordinate {c} out of range for C{n}"
                )));
            }
        }
        Ok(GroupElement { coords })
    }

    /// Builds an element from arbitrary integers, reducing each coordinate.
    pub fn element_reduced(&self, coords: &[u64]) -> Result<GroupElement, AlgebraError> {
        if coords.len() != self.factors.len() {
            return Err(AlgebraError::Parse(format!(
                "expected {} coordinates, got {}",
                self.factors.len(),
                coords.len()
            )));
        }
        Ok(GroupElement {
            coords: coords
                .iter()
                .zip(&self.factors)
                .map(|(c, n)| c % n)
                .collect(),
        })
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        g.coords.len() == self.factors.len()
            && g.coords.iter().zip(&self.factors).all(|(c, n)| c < n)
    }

    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        debug_assert!(self.contains(a) && self.contains(b));
        GroupElement {
            coords: a
                .coords
                .iter()
                .zip(&b.coords)
                .zip(&self.factors)
                .map(|((x, y), n)| (x + y) % n)
                .collect(),
        }
    }

    pub fn neg(&self, a: &GroupElement) -> GroupElement {
        debug_assert!(self.contains(a));
        GroupElement {
            coords: a
                .coords
                .iter()
                .zip(&self.factors)
                .map(|(c, n)| if *c == 0 { 0 } else { n - c })
                .collect(),
        }
    }

    pub fn scalar_mul(&self, k: u64, a: &GroupElement) -> GroupElement {
        debug_assert!(self.contains(a));
        GroupElement {
            coords: a
                .coords
                .iter()
                .zip(&self.factors)
                .map(|(c, n)| (c % n).wrapping_mul(k % n) % n)
                .collect(),
        }
    }

    /// The least `m >= 1` with `m * g = 0`: the lcm over coordinates of
    /// `n_i / gcd(n_i, c_i)`.
    pub fn element_order(&self, g: &GroupElement) -> u64 {
        debug_assert!(self.contains(g));
        g.coords
            .iter()
            .zip(&self.factors)
            .map(|(c, n)| n / n.gcd(c))
            .fold(1u64, |acc, m| acc.lcm(&m))
    }

    /// All elements in lexicographic coordinate order (the canonical total
    /// order used everywhere for enumeration and rendering).
    pub fn elements(&self) -> Vec<GroupElement> {
        let count = self.order() as usize;
        (0..count).map(|i| self.element_at(i)).collect()
    }

    /// The `idx`-th element in lexicographic order (mixed-radix decoding with
    /// the first coordinate most significant).
    pub fn element_at(&self, idx: usize) -> GroupElement {
        let mut rem = idx as u64;
        let mut coords = vec![0u64; self.factors.len()];
        for i in (0..self.factors.len()).rev() {
            coords[i] = rem % self.factors[i];
            rem /= self.factors[i];
        }
        debug_assert_eq!(rem, 0, "element index out of range");
        GroupElement { coords }
    }

    /// Inverse of [`element_at`](Self::element_at).
    pub fn index_of(&self, g: &GroupElement) -> usize {
        debug_assert!(self.contains(g));
        let mut idx = 0u64;
        for (c, n) in g.coords.iter().zip(&self.factors) {
            idx = idx * n + c;
        }
        idx as usize
    }

    /// Elements of maximal order `exp(G)`; for a cyclic group these are its
    /// generators.
    pub fn generators(&self) -> Vec<GroupElement> {
        let e = self.exponent();
        self.elements()
            .into_iter()
            .filter(|g| self.element_order(g) == e)
            .collect()
    }

    /// Renders an element in the text form used by sequences: coordinates
    /// joined with commas, e.g. `1,2` in rank two. The trivial group's single
    /// element renders as `0`.
    pub fn render_element(&self, g: &GroupElement) -> String {
        if self.factors.is_empty() {
            return "0".to_string();
        }
        g.coords
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Parses the element text form produced by [`render_element`](Self::render_element).
    pub fn parse_element(&self, text: &str) -> Result<GroupElement, AlgebraError> {
        if self.factors.is_empty() {
            if text.trim() == "0" {
                return Ok(self.zero());
            }
            return Err(AlgebraError::Parse(format!(
                "bad element `{text}` for the trivial group"
            )));
        }
        let coords = text
            .split(',')
            .map(|c| {
                c.trim()
                    .parse::<u64>()
                    .map_err(|_| AlgebraError::Parse(format!("bad coordinate `{c}`")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        self.element(coords)
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical_name())
    }
}

impl Serialize for GroupSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.canonical_name())
    }
}

impl GroupElement {
    pub fn coords(&self) -> &[u64] {
        &self.coords
    }
}

fn overflow() -> AlgebraError {
    AlgebraError::Parse("group order overflows u64".into())
}

fn prime_factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Addition/negation tables over element indices, used by the enumeration
/// kernels so inner loops work on `usize` instead of coordinate vectors.
pub(crate) struct GroupTable {
    pub order: usize,
    pub add: Vec<u32>, // add[i * order + j] = index of g_i + g_j
    pub neg: Vec<u32>,
}

impl GroupTable {
    pub fn new(spec: &GroupSpec) -> Self {
        let els = spec.elements();
        let order = els.len();
        let mut add = vec![0u32; order * order];
        let mut neg = vec![0u32; order];
        for (i, a) in els.iter().enumerate() {
            neg[i] = spec.index_of(&spec.neg(a)) as u32;
            for (j, b) in els.iter().enumerate() {
                add[i * order + j] = spec.index_of(&spec.add(a, b)) as u32;
            }
        }
        GroupTable { order, add, neg }
    }

    #[inline]
    pub fn add(&self, i: usize, j: usize) -> usize {
        self.add[i * self.order + j] as usize
    }

    #[inline]
    pub fn neg(&self, i: usize) -> usize {
        self.neg[i] as usize
    }
}
