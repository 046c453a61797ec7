//! The two support properties of maximum-length atoms and the shifter
//! elements they yield.
//!
//! Property P asks for elements `g1, g2` and maximum-length atoms `U1, U2`
//! with `g1 g2 | U1` and `g1 + g2` in the support of `U2`; it powers a
//! shifter `a*` whose products with maximal-elasticity sequences have
//! interval length sets. The stronger property P* asks that every nonzero
//! element appear in the support of some maximum-length atom and yields a
//! shifter pushing the catenary degree down to 3.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{GroupElement, Sequence};
use crate::atoms::AtomCatalog;
use crate::elasticity::{enumerate_brho_atoms, enumerate_max_elastic, is_max_elastic};
use crate::factorize::{catenary_degree, length_set, rational_string, FactorizeError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PropertyError {
    #[error("the group must have at least 3 elements")]
    GroupTooSmall,
    #[error("property P fails for this group")]
    PropertyPFails,
    #[error("property P* fails for this group")]
    PropertyPStarFails,
    #[error("sample `{0}` does not have maximal elasticity")]
    SampleNotMaxElastic(String),
    #[error(transparent)]
    Factorize(#[from] FactorizeError),
}

/// Witness for Property P.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropertyPWitness {
    pub g1: GroupElement,
    pub g2: GroupElement,
    pub u1: Sequence,
    pub u2: Sequence,
}

/// Scans the maximum-length stratum for a Property P witness, returning the
/// lexicographically first one (by `U1` position, then `g1`, `g2`, then `U2`
/// position).
pub fn check_property_p(cat: &AtomCatalog) -> Result<Option<PropertyPWitness>, PropertyError> {
    let spec = cat.group();
    if spec.order() < 3 {
        return Err(PropertyError::GroupTooSmall);
    }
    let stratum = cat.max_length_atoms();
    for u1 in &stratum {
        let supp: Vec<&GroupElement> = u1.support().collect();
        for (i, g1) in supp.iter().enumerate() {
            for g2 in &supp[i..] {
                if *g1 == *g2 && u1.multiplicity(g1) < 2 {
                    continue;
                }
                let sum = spec.add(g1, g2);
                for u2 in &stratum {
                    if u2.multiplicity(&sum) > 0 {
                        return Ok(Some(PropertyPWitness {
                            g1: (*g1).clone(),
                            g2: (*g2).clone(),
                            u1: (*u1).clone(),
                            u2: (*u2).clone(),
                        }));
                    }
                }
            }
        }
    }
    Ok(None)
}

/// Property P*: assigns to every nonzero element a maximum-length atom whose
/// support contains it (the first such atom in canonical order), or returns
/// `None` if some element has no assignment.
pub fn check_property_p_star(cat: &AtomCatalog) -> Option<BTreeMap<GroupElement, Sequence>> {
    let spec = cat.group();
    let stratum = cat.max_length_atoms();
    let mut out = BTreeMap::new();
    for g in spec.elements().into_iter().skip(1) {
        let atom = stratum.iter().find(|a| a.multiplicity(&g) > 0)?;
        out.insert(g, (*atom).clone());
    }
    Some(out)
}

/// Enumerates all zero-sum sequences of cardinality at most `max_card` and
/// collects the union and maximum of their sets of distances. This is the
/// bounded empirical stand-in for the set of distances of the whole monoid.
pub fn delta_scan(cat: &AtomCatalog, max_card: u64) -> (BTreeSet<u64>, u64) {
    let spec = cat.group();
    let sequences = crate::checks::oracle::zero_sum_sequences(spec, max_card);
    let all: BTreeSet<u64> = sequences
        .par_iter()
        .map(|b| length_set(b, cat).expect("complete catalog").delta())
        .reduce(BTreeSet::new, |mut a, b| {
            a.extend(b);
            a
        });
    let max = all.last().copied().unwrap_or(0);
    (all, max)
}

/// The interval shifter built from a Property P witness.
#[derive(Clone, Debug)]
pub struct IntervalShifter {
    pub witness: PropertyPWitness,
    /// The seed `(-U1) U1 (-U2) U2`.
    pub a_prime: Sequence,
    pub a_star: Sequence,
    pub k: u64,
    pub delta_bar: u64,
    pub delta_policy: String,
}

/// Builds the interval shifter `a* = (A')^k` where
/// `A' = (-U1) U1 (-U2) U2` and `k` dominates both the empirical maximum
/// distance and the spread of `L(A')`.
///
/// The default distance bound scans all zero-sum sequences of cardinality at
/// most `3 D(G)` (override with `scan_card`) and doubles the maximum distance
/// found; a caller-supplied `delta_bound` is used verbatim. The final
/// conclusion is verified separately by [`verify_shifter`], so an
/// underestimate cannot go unnoticed.
pub fn build_interval_shifter(
    cat: &AtomCatalog,
    delta_bound: Option<u64>,
    scan_card: Option<u64>,
) -> Result<IntervalShifter, PropertyError> {
    let witness = check_property_p(cat)?.ok_or(PropertyError::PropertyPFails)?;
    let a_prime = witness
        .u1
        .negate()
        .product(&witness.u1)
        .product(&witness.u2.negate())
        .product(&witness.u2);
    let l = length_set(&a_prime, cat)?;
    assert!(
        l.contains(l.min() + 1) && l.contains(l.max() - 1),
        "the witness refactorings guarantee the near-extremal lengths"
    );
    let (delta_bar, delta_policy) = match delta_bound {
        Some(d) => (d, format!("caller-supplied distance bound {d}")),
        None => {
            let bound = scan_card.unwrap_or(3 * cat.max_length());
            let (_, max) = delta_scan(cat, bound);
            (
                2 * max,
                format!("2 * max distance ({max}) over zero-sum sequences of cardinality <= {bound}"),
            )
        }
    };
    let k = delta_bar.max(l.max() - l.min());
    let a_star = a_prime.pow(k);
    Ok(IntervalShifter {
        witness,
        a_prime,
        a_star,
        k,
        delta_bar,
        delta_policy,
    })
}

/// Builds the catenary shifter `a* = prod_{g != 0} A_g (-A_g)` from a
/// Property P* assignment. Its support together with 0 covers the whole
/// group, which is what drives the catenary bound.
pub fn build_catenary_shifter(
    cat: &AtomCatalog,
) -> Result<(Sequence, BTreeMap<GroupElement, Sequence>), PropertyError> {
    let spec = cat.group();
    let assignment = check_property_p_star(cat).ok_or(PropertyError::PropertyPStarFails)?;
    let mut a_star = Sequence::empty(spec.clone());
    for a_g in assignment.values() {
        a_star = a_star.product(a_g).product(&a_g.negate());
    }
    let mut covered: BTreeSet<GroupElement> = a_star.support().cloned().collect();
    covered.insert(spec.zero());
    assert_eq!(
        covered.len() as u64,
        spec.order(),
        "support of the shifter plus 0 must be the whole group"
    );
    Ok((a_star, assignment))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShifterMode {
    Interval,
    Catenary3,
}

#[derive(Clone, Debug, Serialize)]
pub struct SampleOutcome {
    pub sample: Sequence,
    pub lengths: Vec<u64>,
    pub interval: bool,
    pub elasticity: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub catenary: Option<u64>,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ShifterReport {
    pub a_star: Sequence,
    pub mode: ShifterMode,
    pub samples: Vec<SampleOutcome>,
    pub all_pass: bool,
}

/// Default verification samples: every maximal-elasticity sequence of
/// cardinality at most `4 D(G)`, plus the generating set of the
/// maximal-elasticity submonoid.
pub fn default_samples(cat: &AtomCatalog) -> Vec<Sequence> {
    let mut pool: BTreeSet<Sequence> =
        enumerate_max_elastic(cat, 4 * cat.max_length()).into_iter().collect();
    pool.extend(enumerate_brho_atoms(cat, 4).generators);
    pool.into_iter().collect()
}

/// Verifies the shifter conclusion on each sample: `L(a* a)` must be an
/// interval with elasticity exactly `D(G)/2`, and in catenary mode the
/// catenary degree of the product must be at most 3.
pub fn verify_shifter(
    cat: &AtomCatalog,
    a_star: &Sequence,
    samples: &[Sequence],
    mode: ShifterMode,
    factorization_cap: usize,
) -> Result<ShifterReport, PropertyError> {
    let rho = Ratio::new(cat.max_length(), 2);
    for a in samples {
        if is_max_elastic(a, cat).is_none() {
            return Err(PropertyError::SampleNotMaxElastic(a.render()));
        }
    }
    let outcomes: Result<Vec<SampleOutcome>, PropertyError> = samples
        .par_iter()
        .map(|a| {
            let product = a_star.product(a);
            let l = length_set(&product, cat)?;
            let catenary = match mode {
                ShifterMode::Interval => None,
                ShifterMode::Catenary3 => {
                    Some(catenary_degree(&product, cat, factorization_cap)?)
                }
            };
            let interval = l.is_interval();
            let elasticity = l.elasticity();
            let pass =
                interval && elasticity == rho && catenary.map_or(true, |c| c <= 3);
            Ok(SampleOutcome {
                sample: a.clone(),
                lengths: l.iter().collect(),
                interval,
                elasticity: rational_string(elasticity),
                catenary,
                pass,
            })
        })
        .collect();
    let samples = outcomes?;
    let all_pass = samples.iter().all(|s| s.pass);
    Ok(ShifterReport {
        a_star: a_star.clone(),
        mode,
        samples,
        all_pass,
    })
}

/// The JSON report emitted by the `property-p` command.
#[derive(Serialize)]
pub struct PropertyReport {
    pub group: String,
    #[serde(rename = "P")]
    pub p: bool,
    pub witness: Option<WitnessJson>,
    #[serde(rename = "Pstar")]
    pub pstar: bool,
    pub assignment: Option<BTreeMap<String, String>>,
}

#[derive(Serialize)]
pub struct WitnessJson {
    pub g1: String,
    pub g2: String,
    pub u1: String,
    pub u2: String,
}

impl PropertyReport {
    pub fn new(cat: &AtomCatalog) -> Result<Self, PropertyError> {
        let spec = cat.group();
        let witness = check_property_p(cat)?;
        let assignment = check_property_p_star(cat);
        Ok(PropertyReport {
            group: spec.canonical_name(),
            p: witness.is_some(),
            witness: witness.map(|w| WitnessJson {
                g1: spec.render_element(&w.g1),
                g2: spec.render_element(&w.g2),
                u1: w.u1.render(),
                u2: w.u2.render(),
            }),
            pstar: assignment.is_some(),
            assignment: assignment.map(|m| {
                m.into_iter()
                    .map(|(g, a)| (spec.render_element(&g), a.render()))
                    .collect()
            }),
        })
    }
}

/// Independent validity check of a Property P witness, used by tests and the
/// verification suite: atom status, lengths, divisibility and membership are
/// all reestablished from scratch.
pub fn witness_is_valid(cat: &AtomCatalog, w: &PropertyPWitness) -> bool {
    let spec = cat.group();
    let d = cat.max_length();
    let pair = Sequence::from_counts(
        spec.clone(),
        [(w.g1.clone(), 1), (w.g2.clone(), 1)],
    );
    crate::atoms::is_atom(&w.u1)
        && crate::atoms::is_atom(&w.u2)
        && w.u1.len() == d
        && w.u2.len() == d
        && pair.divides(&w.u1)
        && w.u2.multiplicity(&spec.add(&w.g1, &w.g2)) > 0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::GroupSpec;
    use crate::atoms::enumerate_atoms;

    fn catalog(name: &str) -> AtomCatalog {
        enumerate_atoms(&GroupSpec::parse(name).unwrap(), None)
    }

    #[test]
    fn property_p_examples() {
        let cat = catalog("C5");
        let w = check_property_p(&cat).unwrap().unwrap();
        assert!(witness_is_valid(&cat, &w));
        assert_eq!(w.g1.coords(), &[1]);
        assert_eq!(w.g2.coords(), &[1]);
        assert_eq!(w.u1.render(), "1^5");
        assert_eq!(w.u2.render(), "2^5");

        assert!(check_property_p(&catalog("C4")).unwrap().is_none());

        let w = check_property_p(&catalog("C2xC2")).unwrap().unwrap();
        assert!(witness_is_valid(&catalog("C2xC2"), &w));
        assert_eq!(w.u1.render(), "0,1+1,0+1,1");
        assert_eq!(w.u2, w.u1);

        assert!(matches!(
            check_property_p(&catalog("C2")),
            Err(PropertyError::GroupTooSmall)
        ));
    }

    #[test]
    fn property_p_star_examples() {
        let cat = catalog("C3");
        let spec = cat.group().clone();
        let m = check_property_p_star(&cat).unwrap();
        assert_eq!(m[&spec.element(vec![1]).unwrap()].render(), "1^3");
        assert_eq!(m[&spec.element(vec![2]).unwrap()].render(), "2^3");

        assert!(check_property_p_star(&catalog("C4")).is_none());

        let cat = catalog("C2xC2");
        let m = check_property_p_star(&cat).unwrap();
        assert!(m.values().all(|a| a.render() == "0,1+1,0+1,1"));
    }

    #[test]
    fn p_star_implies_p() {
        for name in ["C2xC2", "C3", "C4", "C5", "C6", "C7", "C3xC3", "C2xC4"] {
            let cat = catalog(name);
            if check_property_p_star(&cat).is_some() {
                assert!(
                    check_property_p(&cat).unwrap().is_some(),
                    "P* held but P failed over {name}"
                );
            }
        }
    }

    #[test]
    fn interval_shifter_over_c3() {
        let cat = catalog("C3");
        let shifter = build_interval_shifter(&cat, None, None).unwrap();
        assert_eq!(shifter.a_prime.render(), "1^6+2^6");
        let l = length_set(&shifter.a_prime, &cat).unwrap();
        assert_eq!(l.iter().collect::<Vec<_>>(), vec![4, 5, 6]);
        // scan max over C3 is 1, doubled; spread of L(A') is 2
        assert_eq!(shifter.delta_bar, 2);
        assert_eq!(shifter.k, 2);
        assert_eq!(shifter.a_star.render(), "1^12+2^12");

        let report = verify_shifter(
            &cat,
            &shifter.a_star,
            &default_samples(&cat),
            ShifterMode::Interval,
            20_000,
        )
        .unwrap();
        assert!(report.all_pass);
    }

    #[test]
    fn interval_shifter_fails_without_property_p() {
        let cat = catalog("C4");
        assert!(matches!(
            build_interval_shifter(&cat, None, None),
            Err(PropertyError::PropertyPFails)
        ));
    }

    #[test]
    fn shifted_sample_lengths_over_c3() {
        let cat = catalog("C3");
        let c3 = cat.group().clone();
        let a_star = Sequence::parse(&c3, "1^12+2^12").unwrap();
        let a = Sequence::parse(&c3, "1^3+2^3").unwrap();
        let l = length_set(&a_star.product(&a), &cat).unwrap();
        assert_eq!(l.min(), 10);
        assert_eq!(l.max(), 15);
        assert!(l.is_interval());
        assert_eq!(rational_string(l.elasticity()), "3/2");
    }

    #[test]
    fn catenary_shifter_examples() {
        let cat = catalog("C3");
        let (a_star, _) = build_catenary_shifter(&cat).unwrap();
        assert_eq!(a_star.render(), "1^6+2^6");

        let cat = catalog("C2xC2");
        let (a_star, _) = build_catenary_shifter(&cat).unwrap();
        assert_eq!(a_star.render(), "0,1^6+1,0^6+1,1^6");

        assert!(matches!(
            build_catenary_shifter(&catalog("C4")),
            Err(PropertyError::PropertyPStarFails)
        ));
    }

    #[test]
    fn verify_rejects_bad_samples() {
        let cat = catalog("C3");
        let c3 = cat.group().clone();
        let bad = Sequence::parse(&c3, "1^3").unwrap();
        let a_star = Sequence::parse(&c3, "1^12+2^12").unwrap();
        assert!(matches!(
            verify_shifter(&cat, &a_star, &[bad], ShifterMode::Interval, 1000),
            Err(PropertyError::SampleNotMaxElastic(_))
        ));
    }

    #[test]
    fn empty_sample_list_passes_vacuously() {
        let cat = catalog("C3");
        let a_star = Sequence::parse(cat.group(), "1^12+2^12").unwrap();
        let report =
            verify_shifter(&cat, &a_star, &[], ShifterMode::Interval, 1000).unwrap();
        assert!(report.all_pass);
        assert!(report.samples.is_empty());
    }
}
