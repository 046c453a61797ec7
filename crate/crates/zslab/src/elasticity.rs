//! Sequences of maximal elasticity `D(G)/2` and the submonoid they generate.
//!
//! A zero-sum sequence has maximal elasticity exactly when it is
//! simultaneously a product of maximum-length atoms and a product of
//! length-2 atoms. Membership is decided by that structural test — a
//! symmetry condition on multiplicities plus an exact cover by
//! maximum-length atoms — rather than by computing the full length set.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::algebra::{GroupElement, Sequence};
use crate::atoms::AtomCatalog;
use crate::factorize::Factorization;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ElasticityError {
    #[error("operation requires a cyclic group of order at least 3")]
    NotCyclic,
}

/// Witness that a sequence has maximal elasticity: one factorization into
/// maximum-length atoms and one into length-2 atoms.
#[derive(Clone, Debug)]
pub struct MaxElasticCertificate {
    /// Factorization into atoms of length `D(G)`; its length is `min L`.
    pub top: Factorization,
    /// Factorization into atoms of length 2; its length is `max L`.
    pub bottom: Factorization,
    pub k: u64,
    pub l: u64,
}

/// Decides maximal elasticity and returns a constructive certificate.
///
/// The catalog must be complete and unrestricted for the group of `b`.
pub fn is_max_elastic(b: &Sequence, cat: &AtomCatalog) -> Option<MaxElasticCertificate> {
    debug_assert!(cat.is_complete() && cat.restriction().is_none());
    debug_assert_eq!(b.group(), cat.group());
    let spec = b.group();
    let d = cat.max_length();
    if b.is_empty() || b.multiplicity(&spec.zero()) > 0 {
        return None;
    }
    let card = b.len();
    if card % 2 != 0 || card % d != 0 {
        return None;
    }
    let bottom = pair_factorization(b, cat)?;
    let top = cover_with_max_atoms(b, cat)?;
    let k = card / d;
    let l = card / 2;
    debug_assert_eq!(top.length(), k);
    debug_assert_eq!(bottom.length(), l);
    Some(MaxElasticCertificate { top, bottom, k, l })
}

/// Factors `b` into length-2 atoms `g(-g)`, which exists exactly when the
/// multiplicities are symmetric under negation (even on the 2-torsion part).
fn pair_factorization(b: &Sequence, cat: &AtomCatalog) -> Option<Factorization> {
    let spec = b.group();
    let mut parts: BTreeMap<usize, u64> = BTreeMap::new();
    for (g, m) in b.iter() {
        let neg = spec.neg(g);
        if neg == *g {
            if m % 2 != 0 {
                return None;
            }
            let atom = Sequence::power_of(spec.clone(), g.clone(), 2);
            parts.insert(cat.position(&atom)?, m / 2);
        } else {
            if b.multiplicity(&neg) != m {
                return None;
            }
            if *g < neg {
                let atom = Sequence::from_elements(spec.clone(), [g.clone(), neg]);
                parts.insert(cat.position(&atom)?, m);
            }
        }
    }
    Some(Factorization::from_parts(parts))
}

/// Exact-cover search for a factorization of `b` into maximum-length atoms.
fn cover_with_max_atoms(b: &Sequence, cat: &AtomCatalog) -> Option<Factorization> {
    let candidates: Vec<usize> = cat
        .max_length_atom_indices()
        .into_iter()
        .filter(|&i| cat.atom(i).divides(b))
        .collect();
    let mut chosen: Vec<usize> = Vec::new();
    fn rec(
        resid: Sequence,
        from: usize,
        candidates: &[usize],
        cat: &AtomCatalog,
        chosen: &mut Vec<usize>,
    ) -> bool {
        if resid.is_empty() {
            return true;
        }
        for (pos, &i) in candidates.iter().enumerate().skip(from) {
            let atom = cat.atom(i);
            if atom.divides(&resid) {
                chosen.push(i);
                if rec(resid.divide(atom).unwrap(), pos, candidates, cat, chosen) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }
    if !rec(b.clone(), 0, &candidates, cat, &mut chosen) {
        return None;
    }
    let mut parts: BTreeMap<usize, u64> = BTreeMap::new();
    for i in chosen {
        *parts.entry(i).or_insert(0) += 1;
    }
    Some(Factorization::from_parts(parts))
}

/// All maximal-elasticity sequences with cardinality at most `max_card`,
/// canonically ordered: canonical products of maximum-length atoms filtered
/// by the pairing symmetry.
pub fn enumerate_max_elastic(cat: &AtomCatalog, max_card: u64) -> Vec<Sequence> {
    debug_assert!(cat.is_complete() && cat.restriction().is_none());
    let d = cat.max_length();
    let max_atoms = cat.max_length_atom_indices();
    let mut found: BTreeSet<Sequence> = BTreeSet::new();
    if max_atoms.is_empty() || d > max_card {
        return Vec::new();
    }
    let mut stack: Vec<(Sequence, usize)> = max_atoms
        .iter()
        .enumerate()
        .map(|(pos, &i)| (cat.atom(i).clone(), pos))
        .collect();
    while let Some((product, from)) = stack.pop() {
        if is_pair_symmetric(&product) {
            found.insert(product.clone());
        }
        if product.len() + d <= max_card {
            for (pos, &i) in max_atoms.iter().enumerate().skip(from) {
                stack.push((product.product(cat.atom(i)), pos));
            }
        }
    }
    found.into_iter().collect()
}

fn is_pair_symmetric(b: &Sequence) -> bool {
    let spec = b.group();
    b.iter().all(|(g, m)| {
        let neg = spec.neg(g);
        if neg == *g {
            m % 2 == 0
        } else {
            b.multiplicity(&neg) == m
        }
    })
}

/// Over a cyclic group of order `n >= 3`, matches `b` against the shape
/// `prod (g^n (-g)^n)^{n_g}` over generator pairs `{g, -g}` and returns the
/// exponents keyed by the lexicographically smaller pair member.
pub fn cyclic_max_elastic_form(
    b: &Sequence,
) -> Result<Option<BTreeMap<GroupElement, u64>>, ElasticityError> {
    let spec = b.group();
    if !spec.is_cyclic() || spec.order() < 3 {
        return Err(ElasticityError::NotCyclic);
    }
    let n = spec.order();
    if b.is_empty() {
        return Ok(None);
    }
    let mut out: BTreeMap<GroupElement, u64> = BTreeMap::new();
    for (g, m) in b.iter() {
        if spec.element_order(g) != n {
            return Ok(None); // only generators may occur
        }
        let neg = spec.neg(g);
        if b.multiplicity(&neg) != m || m % n != 0 {
            return Ok(None);
        }
        if *g < neg {
            out.insert(g.clone(), m / n);
        }
    }
    Ok(Some(out))
}

/// Generating set of the monoid of maximal-elasticity sequences.
#[derive(Clone, Debug)]
pub struct BRhoCatalog {
    pub group: crate::algebra::GroupSpec,
    /// Irreducible maximal-elasticity sequences, canonically ordered.
    pub generators: Vec<Sequence>,
    /// Search depth: maximum number of maximum-length atom factors examined.
    pub degree_bound: u64,
    /// True when the cyclic closed form certifies that the generator list is
    /// complete; bounded searches over other groups leave this false.
    pub certified_complete: bool,
}

/// Finds every maximal-elasticity sequence, up to `degree_bound` maximum-atom
/// factors, that does not split into two maximal-elasticity factors.
pub fn enumerate_brho_atoms(cat: &AtomCatalog, degree_bound: u64) -> BRhoCatalog {
    debug_assert!(cat.is_complete() && cat.restriction().is_none());
    let spec = cat.group().clone();
    let d = cat.max_length();
    let all = enumerate_max_elastic(cat, degree_bound.saturating_mul(d));
    let mut generators: Vec<Sequence> = Vec::new();
    for b in &all {
        let splits = all.iter().any(|b1| {
            b1.len() < b.len()
                && b1.divides(b)
                && is_max_elastic(&b.divide(b1).unwrap(), cat).is_some()
        });
        if !splits {
            generators.push(b.clone());
        }
    }

    let certified_complete = if spec.is_cyclic() && spec.order() >= 3 && degree_bound >= 2 {
        cyclic_generators_verified(cat, &generators)
    } else {
        false
    };
    BRhoCatalog {
        group: spec,
        generators,
        degree_bound,
        certified_complete,
    }
}

/// One row of the growth census of the maximal-elasticity submonoid.
#[derive(Clone, Debug)]
pub struct CensusRow {
    pub n: u64,
    /// Number of distinct products of exactly `n` generators.
    pub omega: u64,
    /// Number of monoid elements (identity included) of cardinality at most
    /// `n` times the smallest generator cardinality.
    pub cumulative: u64,
    /// `omega(n - k0) / omega(n)`, when defined.
    pub ratio_shift: Option<num_rational::Ratio<u64>>,
    /// `cumulative(n - alpha) / cumulative(n)`, when defined.
    pub ratio_cumulative: Option<num_rational::Ratio<u64>>,
}

#[derive(Clone, Debug)]
pub struct CensusTable {
    pub group: crate::algebra::GroupSpec,
    pub k0: u64,
    pub alpha: u64,
    /// Cardinality unit of the cumulative column.
    pub min_generator_card: u64,
    /// Carried over from the generating set.
    pub certified_complete: bool,
    pub rows: Vec<CensusRow>,
}

/// Tabulates `|n Omega|` (distinct products of `n` generators) together with
/// cumulative element counts and the two shift ratios whose convergence to 1
/// witnesses the polynomial growth of the submonoid.
pub fn brho_census(brho: &BRhoCatalog, n_max: u64, k0: u64, alpha: u64) -> CensusTable {
    assert!(!brho.generators.is_empty(), "census needs generators");
    let min_card = brho.generators.iter().map(Sequence::len).min().unwrap();

    let mut omega = vec![1u64]; // products of 0 generators: the identity
    let mut layer: BTreeSet<Sequence> =
        [Sequence::empty(brho.group.clone())].into_iter().collect();
    let mut union: BTreeSet<Sequence> = BTreeSet::new();
    for _ in 1..=n_max {
        layer = layer
            .iter()
            .flat_map(|b| brho.generators.iter().map(move |g| b.product(g)))
            .collect();
        omega.push(layer.len() as u64);
        union.extend(layer.iter().cloned());
    }
    let mut cards: Vec<u64> = union.iter().map(Sequence::len).collect();
    cards.sort_unstable();
    let cumulative_at =
        |n: u64| 1 + cards.partition_point(|&c| c <= n * min_card) as u64;

    let rows = (1..=n_max)
        .map(|n| CensusRow {
            n,
            omega: omega[n as usize],
            cumulative: cumulative_at(n),
            ratio_shift: n.checked_sub(k0).map(|p| {
                num_rational::Ratio::new(omega[p as usize], omega[n as usize])
            }),
            ratio_cumulative: n
                .checked_sub(alpha)
                .map(|p| num_rational::Ratio::new(cumulative_at(p), cumulative_at(n))),
        })
        .collect();
    CensusTable {
        group: brho.group.clone(),
        k0,
        alpha,
        min_generator_card: min_card,
        certified_complete: brho.certified_complete,
        rows,
    }
}

/// The cyclic closed form: generators are exactly `g^n (-g)^n` over generator
/// pairs, provided the maximum-length stratum is exactly `{g^n}` — checked
/// against the catalog rather than assumed.
fn cyclic_generators_verified(cat: &AtomCatalog, generators: &[Sequence]) -> bool {
    let spec = cat.group();
    let n = spec.order();
    let stratum: BTreeSet<Sequence> = cat.max_length_atoms().into_iter().cloned().collect();
    let powers: BTreeSet<Sequence> = spec
        .generators()
        .into_iter()
        .map(|g| Sequence::power_of(spec.clone(), g, n))
        .collect();
    if stratum != powers {
        return false;
    }
    let expected: BTreeSet<Sequence> = spec
        .generators()
        .into_iter()
        .filter(|g| *g < spec.neg(g))
        .map(|g| {
            Sequence::power_of(spec.clone(), g.clone(), n)
                .product(&Sequence::power_of(spec.clone(), spec.neg(&g), n))
        })
        .collect();
    generators.iter().cloned().collect::<BTreeSet<_>>() == expected
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::GroupSpec;
    use crate::atoms::enumerate_atoms;
    use crate::factorize::length_set;
    use num_rational::Ratio;

    fn seq(group: &GroupSpec, text: &str) -> Sequence {
        Sequence::parse(group, text).unwrap()
    }

    #[test]
    fn certificate_examples() {
        let c3 = GroupSpec::parse("C3").unwrap();
        let cat = enumerate_atoms(&c3, None);
        let cert = is_max_elastic(&seq(&c3, "1^3+2^3"), &cat).unwrap();
        assert_eq!((cert.k, cert.l), (2, 3));
        assert_eq!(cert.top.product(&cat), seq(&c3, "1^3+2^3"));
        assert_eq!(cert.bottom.product(&cat), seq(&c3, "1^3+2^3"));

        // a zero in the support kills maximal elasticity
        assert!(is_max_elastic(&seq(&c3, "0+1^3+2^3"), &cat).is_none());

        // an atom has a single length, elasticity 1
        let c4 = GroupSpec::parse("C4").unwrap();
        let cat4 = enumerate_atoms(&c4, None);
        assert!(is_max_elastic(&seq(&c4, "1^2+2"), &cat4).is_none());
    }

    #[test]
    fn certificate_matches_elasticity_of_length_set() {
        // equivalence on every zero-sum sequence of bounded size
        for name in ["C3", "C4"] {
            let spec = GroupSpec::parse(name).unwrap();
            let cat = enumerate_atoms(&spec, None);
            let d = cat.davenport();
            let rho = Ratio::new(d, 2);
            for b in crate::checks::oracle::zero_sum_sequences(&spec, 8) {
                if b.is_empty() {
                    continue;
                }
                let by_cert = is_max_elastic(&b, &cat).is_some();
                let by_rho = length_set(&b, &cat).unwrap().elasticity() == rho;
                assert_eq!(by_cert, by_rho, "mismatch at {b} over {name}");
            }
        }
    }

    #[test]
    fn enumerate_examples() {
        let c3 = GroupSpec::parse("C3").unwrap();
        let cat = enumerate_atoms(&c3, None);
        let got: Vec<String> = enumerate_max_elastic(&cat, 12)
            .iter()
            .map(|s| s.render())
            .collect();
        assert_eq!(got, vec!["1^3+2^3", "1^6+2^6"]);
        assert!(enumerate_max_elastic(&cat, 5).is_empty());

        let c4 = GroupSpec::parse("C4").unwrap();
        let cat4 = enumerate_atoms(&c4, None);
        let got: Vec<String> = enumerate_max_elastic(&cat4, 16)
            .iter()
            .map(|s| s.render())
            .collect();
        assert_eq!(got, vec!["1^4+3^4", "1^8+3^8"]);
    }

    #[test]
    fn cyclic_form_examples() {
        let c3 = GroupSpec::parse("C3").unwrap();
        let form = cyclic_max_elastic_form(&seq(&c3, "1^3+2^3")).unwrap().unwrap();
        assert_eq!(form.len(), 1);
        assert_eq!(form[&c3.element(vec![1]).unwrap()], 1);

        let c4 = GroupSpec::parse("C4").unwrap();
        let form = cyclic_max_elastic_form(&seq(&c4, "1^8+3^8")).unwrap().unwrap();
        assert_eq!(form[&c4.element(vec![1]).unwrap()], 2);

        // 2 is not a generator of C8
        let c8 = GroupSpec::parse("C8").unwrap();
        assert!(cyclic_max_elastic_form(&seq(&c8, "1^4+2^4")).unwrap().is_none());

        let v4 = GroupSpec::parse("C2xC2").unwrap();
        assert!(matches!(
            cyclic_max_elastic_form(&Sequence::empty(v4)),
            Err(ElasticityError::NotCyclic)
        ));
    }

    #[test]
    fn cyclic_form_agrees_with_certificate() {
        for name in ["C3", "C4", "C5", "C6"] {
            let spec = GroupSpec::parse(name).unwrap();
            let cat = enumerate_atoms(&spec, None);
            for b in crate::checks::oracle::zero_sum_sequences(&spec, 2 * cat.davenport()) {
                if b.is_empty() {
                    continue;
                }
                let by_form = cyclic_max_elastic_form(&b).unwrap().is_some();
                let by_cert = is_max_elastic(&b, &cat).is_some();
                assert_eq!(by_form, by_cert, "disagreement at {b} over {name}");
            }
        }
    }

    #[test]
    fn brho_generators() {
        let c3 = GroupSpec::parse("C3").unwrap();
        let cat = enumerate_atoms(&c3, None);
        let brho = enumerate_brho_atoms(&cat, 4);
        let got: Vec<String> = brho.generators.iter().map(|s| s.render()).collect();
        assert_eq!(got, vec!["1^3+2^3"]);
        assert!(brho.certified_complete);

        let c5 = GroupSpec::parse("C5").unwrap();
        let cat5 = enumerate_atoms(&c5, None);
        let brho = enumerate_brho_atoms(&cat5, 4);
        let got: Vec<String> = brho.generators.iter().map(|s| s.render()).collect();
        assert_eq!(got, vec!["1^5+4^5", "2^5+3^5"]);
        assert!(brho.certified_complete);

        let v4 = GroupSpec::parse("C2xC2").unwrap();
        let catv = enumerate_atoms(&v4, None);
        let brho = enumerate_brho_atoms(&catv, 4);
        let got: Vec<String> = brho.generators.iter().map(|s| s.render()).collect();
        assert_eq!(got, vec!["0,1^2+1,0^2+1,1^2"]);
        assert!(!brho.certified_complete);
    }

    #[test]
    fn every_bounded_max_elastic_is_a_generator_product() {
        let c5 = GroupSpec::parse("C5").unwrap();
        let cat = enumerate_atoms(&c5, None);
        let brho = enumerate_brho_atoms(&cat, 6);
        assert!(brho.certified_complete);
        for b in enumerate_max_elastic(&cat, 30) {
            let mut resid = b.clone();
            // greedy division by generators must exhaust the sequence
            loop {
                if resid.is_empty() {
                    break;
                }
                let step = brho
                    .generators
                    .iter()
                    .find(|g| g.divides(&resid))
                    .unwrap_or_else(|| panic!("{b} is not a generator product"));
                resid = resid.divide(step).unwrap();
            }
        }
    }
}
