//! Factorizations of zero-sum sequences into atoms and the invariants
//! attached to them: length sets, sets of distances, elasticity, the
//! factorization distance, the catenary degree, and the k-th elasticities.
//!
//! Length sets are computed by a memoized dynamic program over residual
//! exponent vectors and never by materializing the factorization set, so
//! products with hundreds of elements stay feasible. Full enumeration is
//! reserved for distance/catenary work under an explicit cap.

pub mod aamp;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::hash::Hash;

use num_rational::Ratio;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{GroupElement, Sequence};
use crate::atoms::AtomCatalog;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FactorizeError {
    #[error("atom catalog does not cover the target sequence")]
    CatalogIncomplete,
    #[error("sequence is not zero-sum, so it has no factorization")]
    NotZeroSum,
    #[error("factorization set exceeds the cap of {cap}")]
    FactorizationSetTooLarge { cap: usize },
    #[error("factorizations have different targets")]
    TargetMismatch,
    #[error("element multiplicity too large for the length-set engine")]
    MultiplicityTooLarge,
}

/// A factorization `z` of a fixed target: atom catalog indices with
/// multiplicities. Equality is structural via the canonical index order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Factorization {
    parts: BTreeMap<usize, u64>,
}

impl Factorization {
    /// Builds a factorization and checks that its product is `target`.
    pub fn new(
        parts: BTreeMap<usize, u64>,
        cat: &AtomCatalog,
        target: &Sequence,
    ) -> Result<Self, FactorizeError> {
        let z = Factorization { parts };
        if &z.product(cat) != target {
            return Err(FactorizeError::TargetMismatch);
        }
        Ok(z)
    }

    pub(crate) fn from_parts(parts: BTreeMap<usize, u64>) -> Self {
        Factorization { parts }
    }

    pub fn parts(&self) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.parts.iter().map(|(&i, &m)| (i, m))
    }

    /// The factorization length `|z|`: the number of atom factors.
    pub fn length(&self) -> u64 {
        self.parts.values().sum()
    }

    pub fn product(&self, cat: &AtomCatalog) -> Sequence {
        let mut acc = Sequence::empty(cat.group().clone());
        for (&i, &m) in &self.parts {
            acc = acc.product(&cat.atom(i).pow(m));
        }
        acc
    }

    pub fn render(&self, cat: &AtomCatalog) -> String {
        if self.parts.is_empty() {
            return "()".to_string();
        }
        self.parts
            .iter()
            .map(|(&i, &m)| {
                let a = cat.atom(i).render();
                if m == 1 {
                    format!("({a})")
                } else {
                    format!("({a})^{m}")
                }
            })
            .collect::<Vec<_>>()
            .join("")
    }

    fn distance_to(&self, other: &Factorization) -> u64 {
        let mut common = 0u64;
        for (&i, &m) in &self.parts {
            common += m.min(other.parts.get(&i).copied().unwrap_or(0));
        }
        (self.length() - common).max(other.length() - common)
    }
}

/// The factorization distance `d(x, y) = max(|gcd^-1 x|, |gcd^-1 y|)`.
/// Errors unless both factorizations have the same product.
pub fn distance(
    x: &Factorization,
    y: &Factorization,
    cat: &AtomCatalog,
) -> Result<u64, FactorizeError> {
    if x.product(cat) != y.product(cat) {
        return Err(FactorizeError::TargetMismatch);
    }
    Ok(x.distance_to(y))
}

/// A finite, nonempty set of factorization lengths with its derived
/// statistics.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LengthSet {
    lengths: BTreeSet<u64>,
}

impl LengthSet {
    pub fn new(lengths: BTreeSet<u64>) -> Self {
        assert!(!lengths.is_empty(), "length sets are nonempty");
        LengthSet { lengths }
    }

    pub fn from_iter<I: IntoIterator<Item = u64>>(it: I) -> Self {
        Self::new(it.into_iter().collect())
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.lengths.iter().copied()
    }

    pub fn contains(&self, k: u64) -> bool {
        self.lengths.contains(&k)
    }

    pub fn count(&self) -> usize {
        self.lengths.len()
    }

    pub fn min(&self) -> u64 {
        *self.lengths.first().unwrap()
    }

    pub fn max(&self) -> u64 {
        *self.lengths.last().unwrap()
    }

    /// The set of distances: gaps between consecutive lengths.
    pub fn delta(&self) -> BTreeSet<u64> {
        let v: Vec<u64> = self.lengths.iter().copied().collect();
        v.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// Exact elasticity `max/min`; the length set `{0}` of the identity has
    /// elasticity 1 by convention.
    pub fn elasticity(&self) -> Ratio<u64> {
        if self.min() == 0 {
            return Ratio::from_integer(1);
        }
        Ratio::new(self.max(), self.min())
    }

    /// Whether the set is an interval, equivalently whether every distance
    /// equals 1.
    pub fn is_interval(&self) -> bool {
        self.max() - self.min() + 1 == self.lengths.len() as u64
    }
}

/// Renders an exact rational as `p/q`, always including the denominator.
pub fn rational_string(r: Ratio<u64>) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// The JSON report emitted by the `lengths` command.
#[derive(Serialize)]
pub struct LengthSetReport {
    pub group: String,
    pub sequence: String,
    pub lengths: Vec<u64>,
    pub min: u64,
    pub max: u64,
    pub delta: Vec<u64>,
    pub elasticity: String,
    pub interval: bool,
}

impl LengthSetReport {
    pub fn new(b: &Sequence, l: &LengthSet) -> Self {
        LengthSetReport {
            group: b.group().canonical_name(),
            sequence: b.render(),
            lengths: l.iter().collect(),
            min: l.min(),
            max: l.max(),
            delta: l.delta().into_iter().collect(),
            elasticity: rational_string(l.elasticity()),
            interval: l.is_interval(),
        }
    }
}

/// Enumerates the full factorization set `Z(b)`, optionally capped.
/// Factorizations are produced as nondecreasing atom-index multisets, so the
/// result is exhaustive and duplicate-free.
pub fn enumerate_factorizations(
    b: &Sequence,
    cat: &AtomCatalog,
    cap: Option<usize>,
) -> Result<Vec<Factorization>, FactorizeError> {
    if !cat.covers(b) {
        return Err(FactorizeError::CatalogIncomplete);
    }
    if b.sigma() != b.group().zero() {
        return Err(FactorizeError::NotZeroSum);
    }
    let dividing: Vec<usize> = (0..cat.len())
        .filter(|&i| cat.atom(i).divides(b))
        .collect();
    let mut out = Vec::new();
    let mut stack: Vec<usize> = Vec::new();
    rec_enumerate(b.clone(), &dividing, 0, cat, &mut stack, &mut out, cap)?;
    out.sort_unstable();
    Ok(out)
}

fn rec_enumerate(
    resid: Sequence,
    dividing: &[usize],
    from: usize,
    cat: &AtomCatalog,
    stack: &mut Vec<usize>,
    out: &mut Vec<Factorization>,
    cap: Option<usize>,
) -> Result<(), FactorizeError> {
    if resid.is_empty() {
        let mut parts: BTreeMap<usize, u64> = BTreeMap::new();
        for &i in stack.iter() {
            *parts.entry(i).or_insert(0) += 1;
        }
        out.push(Factorization::from_parts(parts));
        if let Some(cap) = cap {
            if out.len() > cap {
                return Err(FactorizeError::FactorizationSetTooLarge { cap });
            }
        }
        return Ok(());
    }
    for (pos, &ai) in dividing.iter().enumerate().skip(from) {
        let atom = cat.atom(ai);
        if atom.divides(&resid) {
            stack.push(ai);
            rec_enumerate(
                resid.divide(atom).unwrap(),
                dividing,
                pos,
                cat,
                stack,
                out,
                cap,
            )?;
            stack.pop();
        }
    }
    Ok(())
}

/// Computes the length set `L(b)` by dynamic programming over residual
/// exponent vectors; the factorization set itself is never materialized.
pub fn length_set(b: &Sequence, cat: &AtomCatalog) -> Result<LengthSet, FactorizeError> {
    if !cat.covers(b) {
        return Err(FactorizeError::CatalogIncomplete);
    }
    if b.sigma() != b.group().zero() {
        return Err(FactorizeError::NotZeroSum);
    }
    if b.is_empty() {
        return Ok(LengthSet::from_iter([0]));
    }

    let support: Vec<&GroupElement> = b.support().collect();
    let mut target = Vec::with_capacity(support.len());
    for g in &support {
        let m = b.multiplicity(g);
        if m > u16::MAX as u64 {
            return Err(FactorizeError::MultiplicityTooLarge);
        }
        target.push(m as u16);
    }
    let atom_vecs: Vec<Vec<u16>> = cat
        .atoms()
        .iter()
        .filter(|a| a.divides(b))
        .map(|a| {
            support
                .iter()
                .map(|g| a.multiplicity(g) as u16)
                .collect::<Vec<u16>>()
        })
        .collect();

    let bits = b.len() as usize + 1;
    let words = bits.div_ceil(64);
    let achieved = if support.len() <= 8 {
        Dp::<[u16; 8]>::run(&atom_vecs, target, words)
    } else {
        Dp::<Box<[u16]>>::run(&atom_vecs, target, words)
    };

    let lengths: BTreeSet<u64> = crate::bitset::ones(&achieved).map(|i| i as u64).collect();
    if lengths.is_empty() {
        // unreachable for zero-sum b over a covering catalog
        return Err(FactorizeError::CatalogIncomplete);
    }
    Ok(LengthSet::new(lengths))
}

trait DpKey: Hash + Eq {
    fn make(resid: &[u16]) -> Self;
}

impl DpKey for [u16; 8] {
    fn make(resid: &[u16]) -> Self {
        let mut k = [0u16; 8];
        k[..resid.len()].copy_from_slice(resid);
        k
    }
}

impl DpKey for Box<[u16]> {
    fn make(resid: &[u16]) -> Self {
        resid.into()
    }
}

struct Dp<'a, K> {
    atoms: &'a [Vec<u16>],
    memo: HashMap<K, u32>,
    vals: Vec<Box<[u64]>>,
    words: usize,
}

impl<'a, K: DpKey> Dp<'a, K> {
    fn run(atoms: &'a [Vec<u16>], mut target: Vec<u16>, words: usize) -> Box<[u64]> {
        let mut dp: Dp<'a, K> = Dp {
            atoms,
            memo: HashMap::new(),
            vals: Vec::new(),
            words,
        };
        let root = dp.rec(&mut target);
        dp.vals.swap_remove(root as usize)
    }

    fn rec(&mut self, resid: &mut [u16]) -> u32 {
        let key = K::make(resid);
        if let Some(&idx) = self.memo.get(&key) {
            return idx;
        }
        let mut acc = vec![0u64; self.words].into_boxed_slice();
        if resid.iter().all(|&v| v == 0) {
            acc[0] = 1; // the empty factorization has length 0
        } else {
            for ai in 0..self.atoms.len() {
                let atom = &self.atoms[ai];
                if atom.iter().zip(resid.iter()).all(|(a, r)| a <= r) {
                    for (r, a) in resid.iter_mut().zip(atom.iter()) {
                        *r -= a;
                    }
                    let child = self.rec(resid);
                    for (r, a) in resid.iter_mut().zip(atom.iter()) {
                        *r += a;
                    }
                    or_shifted(&mut acc, &self.vals[child as usize]);
                }
            }
        }
        let idx = self.vals.len() as u32;
        self.vals.push(acc);
        self.memo.insert(key, idx);
        idx
    }
}

/// `acc |= child << 1`, the "use one more atom" transition.
fn or_shifted(acc: &mut [u64], child: &[u64]) {
    let mut carry = 0u64;
    for (a, &c) in acc.iter_mut().zip(child.iter()) {
        *a |= (c << 1) | carry;
        carry = c >> 63;
    }
}

/// The catenary degree of `b`: the least `N` such that the graph on `Z(b)`
/// with edges of distance at most `N` is connected. Computed as the largest
/// edge used by a minimum-bottleneck spanning run over the complete distance
/// graph (edges sorted ascending, union-find until connected).
pub fn catenary_degree(
    b: &Sequence,
    cat: &AtomCatalog,
    cap: usize,
) -> Result<u64, FactorizeError> {
    let zs = enumerate_factorizations(b, cat, Some(cap))?;
    if zs.len() <= 1 {
        return Ok(0);
    }
    let mut edges = Vec::with_capacity(zs.len() * (zs.len() - 1) / 2);
    for i in 0..zs.len() {
        for j in i + 1..zs.len() {
            edges.push((zs[i].distance_to(&zs[j]), i, j));
        }
    }
    edges.sort_unstable();
    let mut uf = UnionFind::new(zs.len());
    let mut components = zs.len();
    let mut bottleneck = 0;
    for (d, i, j) in edges {
        if uf.unite(i, j) {
            bottleneck = d;
            components -= 1;
            if components == 1 {
                break;
            }
        }
    }
    Ok(bottleneck)
}

struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn root(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn unite(&mut self, x: usize, y: usize) -> bool {
        let (rx, ry) = (self.root(x), self.root(y));
        if rx == ry {
            return false;
        }
        match self.rank[rx].cmp(&self.rank[ry]) {
            std::cmp::Ordering::Less => self.parent[rx] = ry,
            std::cmp::Ordering::Greater => self.parent[ry] = rx,
            std::cmp::Ordering::Equal => {
                self.parent[ry] = rx;
                self.rank[rx] += 1;
            }
        }
        true
    }
}

/// Result of a `rho_k` search.
#[derive(Clone, Debug)]
pub struct RhoKOutcome {
    pub value: u64,
    /// Whether the search space was fully explored within the node cap.
    pub exhaustive: bool,
    /// A product attaining `value`.
    pub witness: Option<Sequence>,
}

/// The k-th elasticity: the maximum of `max L(b)` over products `b` of `k`
/// atoms, searched over canonical nondecreasing atom tuples with pruning by
/// the best attainable maximum length.
pub fn rho_k(cat: &AtomCatalog, k: u64, node_cap: u64) -> Result<RhoKOutcome, FactorizeError> {
    assert!(k >= 1);
    if !cat.is_complete() || cat.restriction().is_some() {
        return Err(FactorizeError::CatalogIncomplete);
    }
    let d = cat.max_length();
    let mut best = RhoKOutcome {
        value: 0,
        exhaustive: true,
        witness: None,
    };
    let mut nodes = 0u64;
    let empty = Sequence::empty(cat.group().clone());
    rec_rho(cat, k, d, &empty, 0, &mut best, &mut nodes, node_cap);
    Ok(best)
}

#[allow(clippy::too_many_arguments)]
fn rec_rho(
    cat: &AtomCatalog,
    remaining: u64,
    d: u64,
    product: &Sequence,
    from: usize,
    best: &mut RhoKOutcome,
    nodes: &mut u64,
    node_cap: u64,
) {
    *nodes += 1;
    if *nodes > node_cap {
        best.exhaustive = false;
        return;
    }
    let zeros = product.multiplicity(&cat.group().zero());
    if remaining == 0 {
        let max_len = length_set(product, cat).expect("complete catalog").max();
        if max_len > best.value {
            best.value = max_len;
            best.witness = Some(product.clone());
        }
        return;
    }
    // optimistic bound: a further atom contributes at most D/2 to the
    // maximum length, except the atom `0` which contributes exactly 1
    let all_big = zeros + (product.len() - zeros + remaining * d) / 2;
    let all_zero = zeros + remaining + (product.len() - zeros) / 2;
    if all_big.max(all_zero) <= best.value {
        return;
    }
    for i in from..cat.len() {
        if !best.exhaustive {
            return;
        }
        let next = product.product(cat.atom(i));
        rec_rho(cat, remaining - 1, d, &next, i, best, nodes, node_cap);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::GroupSpec;
    use crate::atoms::{atoms_dividing, enumerate_atoms};

    fn seq(group: &GroupSpec, text: &str) -> Sequence {
        Sequence::parse(group, text).unwrap()
    }

    #[test]
    fn enumerate_factorizations_examples() {
        let c3 = GroupSpec::parse("C3").unwrap();
        let cat = enumerate_atoms(&c3, None);
        let b = seq(&c3, "1^3+2^3");
        let zs = enumerate_factorizations(&b, &cat, None).unwrap();
        assert_eq!(zs.len(), 2);
        let rendered: Vec<String> = zs.iter().map(|z| z.render(&cat)).collect();
        assert_eq!(rendered, vec!["(1+2)^3", "(1^3)(2^3)"]);

        // an atom factors uniquely
        let zs = enumerate_factorizations(&seq(&c3, "1^3"), &cat, None).unwrap();
        assert_eq!(zs.len(), 1);

        // the empty sequence has exactly the empty factorization
        let zs =
            enumerate_factorizations(&Sequence::empty(c3.clone()), &cat, None).unwrap();
        assert_eq!(zs.len(), 1);
        assert_eq!(zs[0].length(), 0);

        let c4 = GroupSpec::parse("C4").unwrap();
        let cat4 = enumerate_atoms(&c4, None);
        let zs = enumerate_factorizations(&seq(&c4, "1^4+3^4"), &cat4, None).unwrap();
        let rendered: Vec<String> = zs.iter().map(|z| z.render(&cat4)).collect();
        assert_eq!(rendered, vec!["(1+3)^4", "(1^4)(3^4)"]);
    }

    #[test]
    fn length_set_examples() {
        let c3 = GroupSpec::parse("C3").unwrap();
        let cat = enumerate_atoms(&c3, None);
        let l = length_set(&seq(&c3, "1^3+2^3"), &cat).unwrap();
        assert_eq!(l.iter().collect::<Vec<_>>(), vec![2, 3]);

        let l = length_set(&seq(&c3, "1^6+2^6"), &cat).unwrap();
        assert_eq!(l.iter().collect::<Vec<_>>(), vec![4, 5, 6]);

        let c4 = GroupSpec::parse("C4").unwrap();
        let cat4 = enumerate_atoms(&c4, None);
        let l = length_set(&seq(&c4, "1^4+3^4"), &cat4).unwrap();
        assert_eq!(l.iter().collect::<Vec<_>>(), vec![2, 4]);
        assert_eq!(l.delta().into_iter().collect::<Vec<_>>(), vec![2]);
        assert_eq!(rational_string(l.elasticity()), "2/1");
        assert!(!l.is_interval());
    }

    #[test]
    fn length_set_matches_enumeration() {
        let c4 = GroupSpec::parse("C4").unwrap();
        let cat = enumerate_atoms(&c4, None);
        for text in ["1^4+3^4", "1^3+2+3", "2^2+1^2+3^2", "1^8+2^2+3^4", "0^3+1+3"] {
            let b = seq(&c4, text);
            let zs = enumerate_factorizations(&b, &cat, None).unwrap();
            let want: BTreeSet<u64> = zs.iter().map(|z| z.length()).collect();
            let got = length_set(&b, &cat).unwrap();
            assert_eq!(got.iter().collect::<BTreeSet<_>>(), want, "for {text}");
        }
    }

    #[test]
    fn length_set_works_with_restricted_catalog() {
        let c8 = GroupSpec::parse("C8").unwrap();
        let b = seq(&c8, "1^8+3^8");
        let cat = atoms_dividing(&b);
        let l = length_set(&b, &cat).unwrap();
        // 2: (1^8)(3^8); 3: (1+3^5)(1^5+3)(1^2+3^2); 4: (1^2+3^2)^4
        assert_eq!(l.iter().collect::<Vec<_>>(), vec![2, 3, 4]);
        let zs = enumerate_factorizations(&b, &cat, None).unwrap();
        let want: BTreeSet<u64> = zs.iter().map(|z| z.length()).collect();
        assert_eq!(l.iter().collect::<BTreeSet<_>>(), want);
    }

    #[test]
    fn errors_are_reported() {
        let c4 = GroupSpec::parse("C4").unwrap();
        let truncated = enumerate_atoms(&c4, Some(2));
        let b = seq(&c4, "1^4+3^4");
        assert!(matches!(
            length_set(&b, &truncated),
            Err(FactorizeError::CatalogIncomplete)
        ));
        let cat = enumerate_atoms(&c4, None);
        assert!(matches!(
            length_set(&seq(&c4, "1^2"), &cat),
            Err(FactorizeError::NotZeroSum)
        ));
        assert!(matches!(
            enumerate_factorizations(&b, &cat, Some(1)),
            Err(FactorizeError::FactorizationSetTooLarge { cap: 1 })
        ));
    }

    #[test]
    fn distance_examples() {
        let c3 = GroupSpec::parse("C3").unwrap();
        let cat = enumerate_atoms(&c3, None);
        let b = seq(&c3, "1^3+2^3");
        let zs = enumerate_factorizations(&b, &cat, None).unwrap();
        assert_eq!(distance(&zs[0], &zs[0], &cat).unwrap(), 0);
        assert_eq!(distance(&zs[0], &zs[1], &cat).unwrap(), 3);

        // different targets error out
        let other = enumerate_factorizations(&seq(&c3, "1^3"), &cat, None).unwrap();
        assert!(matches!(
            distance(&zs[0], &other[0], &cat),
            Err(FactorizeError::TargetMismatch)
        ));
    }

    #[test]
    fn distance_lower_bound_holds() {
        let c4 = GroupSpec::parse("C4").unwrap();
        let cat = enumerate_atoms(&c4, None);
        let b = seq(&c4, "1^4+2^2+3^4");
        let zs = enumerate_factorizations(&b, &cat, None).unwrap();
        for i in 0..zs.len() {
            for j in i + 1..zs.len() {
                let d = zs[i].distance_to(&zs[j]);
                let gap = zs[i].length().abs_diff(zs[j].length());
                assert!(d >= 2 + gap);
            }
        }
    }

    #[test]
    fn catenary_examples() {
        let c3 = GroupSpec::parse("C3").unwrap();
        let cat = enumerate_atoms(&c3, None);
        assert_eq!(catenary_degree(&seq(&c3, "1^3"), &cat, 1000).unwrap(), 0);
        assert_eq!(catenary_degree(&seq(&c3, "1^3+2^3"), &cat, 1000).unwrap(), 3);
    }

    #[test]
    fn rho_k_table_rows() {
        for (name, n) in [("C3", 3), ("C4", 4)] {
            let spec = GroupSpec::parse(name).unwrap();
            let cat = enumerate_atoms(&spec, None);
            let r2 = rho_k(&cat, 2, 1_000_000).unwrap();
            assert!(r2.exhaustive);
            assert_eq!(r2.value, n);
            let r3 = rho_k(&cat, 3, 1_000_000).unwrap();
            assert!(r3.exhaustive);
            assert_eq!(r3.value, n + 1);
        }
    }
}
