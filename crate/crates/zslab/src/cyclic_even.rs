//! The even-order cyclic program: the missing penultimate length, the
//! three-atom construction available when `n + 1` is composite, the tail
//! interval shifter it powers, and exhaustive cancellation searches with
//! machine-readable exhaustion certificates.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{GroupElement, GroupSpec, Sequence};
use crate::atoms::{atoms_dividing, enumerate_atoms, is_atom};
use crate::elasticity::cyclic_max_elastic_form;
use crate::factorize::{aamp::minimal_aamp_bound, length_set, rational_string, LengthSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CyclicEvenError {
    #[error("the group order must be even and at least 4")]
    OddOrder,
    #[error("n + 1 is prime, the construction needs a composite n + 1")]
    NPlusOnePrime,
    #[error("n + 1 is composite, this search targets prime n + 1")]
    NPlusOneComposite,
}

fn cyclic(n: u64) -> GroupSpec {
    GroupSpec::from_orders(&[n]).unwrap()
}

fn residue(spec: &GroupSpec, r: u64) -> GroupElement {
    spec.element(vec![r % spec.order()]).unwrap()
}

fn is_prime(m: u64) -> bool {
    if m < 2 {
        return false;
    }
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            return false;
        }
        p += 1;
    }
    true
}

fn units(n: u64) -> Vec<u64> {
    (1..n).filter(|c| num_integer::gcd(*c, n) == 1).collect()
}

/// Report of a scan over maximal-elasticity sequences checking whether any
/// of them has `max L - 1` as a length.
#[derive(Clone, Debug)]
pub struct PenultimateReport {
    pub n: u64,
    pub max_card: u64,
    pub checked: u64,
    /// Sequences whose length set does contain `max L - 1`.
    pub counterexamples: Vec<(Sequence, Vec<u64>)>,
    /// Whether the maximum-length stratum was cross-checked against the full
    /// atom catalog (done for small orders only).
    pub stratum_verified: bool,
}

impl PenultimateReport {
    pub fn holds(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

/// Scans every maximal-elasticity sequence of cardinality at most `max_card`
/// over the cyclic group of order `n >= 3`, enumerated through the closed
/// pair form `prod (g^n (-g)^n)^{n_g}`.
pub fn penultimate_scan(n: u64, max_card: u64) -> PenultimateReport {
    assert!(n >= 3);
    let spec = cyclic(n);
    let stratum_verified = if n <= 12 {
        let cat = enumerate_atoms(&spec, None);
        let stratum: BTreeSet<Sequence> = cat.max_length_atoms().into_iter().cloned().collect();
        let powers: BTreeSet<Sequence> = spec
            .generators()
            .into_iter()
            .map(|g| Sequence::power_of(spec.clone(), g, n))
            .collect();
        stratum == powers
    } else {
        false
    };

    let sequences = pair_form_sequences(&spec, max_card);
    let counterexamples: Vec<(Sequence, Vec<u64>)> = sequences
        .par_iter()
        .filter_map(|b| {
            let l = length_set(b, &atoms_dividing(b)).expect("restricted catalog covers b");
            if l.contains(l.max() - 1) {
                Some((b.clone(), l.iter().collect()))
            } else {
                None
            }
        })
        .collect();
    let mut counterexamples = counterexamples;
    counterexamples.sort_unstable();
    PenultimateReport {
        n,
        max_card,
        checked: sequences.len() as u64,
        counterexamples,
        stratum_verified,
    }
}

/// All nonempty products of pairs `g^n (-g)^n` of cardinality at most
/// `max_card`; by the cyclic pair form these are exactly the
/// maximal-elasticity sequences.
fn pair_form_sequences(spec: &GroupSpec, max_card: u64) -> Vec<Sequence> {
    let n = spec.order();
    let pairs: Vec<Sequence> = spec
        .generators()
        .into_iter()
        .filter(|g| *g < spec.neg(g))
        .map(|g| {
            Sequence::power_of(spec.clone(), g.clone(), n)
                .product(&Sequence::power_of(spec.clone(), spec.neg(&g), n))
        })
        .collect();
    let mut out = Vec::new();
    let mut stack: Vec<(Sequence, usize)> = pairs
        .iter()
        .enumerate()
        .filter(|_| 2 * n <= max_card)
        .map(|(i, p)| (p.clone(), i))
        .collect();
    while let Some((b, from)) = stack.pop() {
        out.push(b.clone());
        if b.len() + 2 * n <= max_card {
            for (i, p) in pairs.iter().enumerate().skip(from) {
                stack.push((b.product(p), i));
            }
        }
    }
    out.sort_unstable();
    out
}

/// The even-order statement proper: errors on odd `n`, otherwise reports the
/// scan. Use [`penultimate_scan`] directly to watch the check fail on odd
/// orders.
pub fn verify_no_penultimate(n: u64, max_card: u64) -> Result<PenultimateReport, CyclicEvenError> {
    if n % 2 != 0 || n < 4 {
        return Err(CyclicEvenError::OddOrder);
    }
    Ok(penultimate_scan(n, max_card))
}

/// The three-atom refactorization of `g^n (ag)^n` available whenever
/// `n + 1 = ab` with `a, b >= 3`.
#[derive(Clone, Debug)]
pub struct ThreeAtomWitness {
    pub n: u64,
    pub factor_a: u64,
    pub factor_b: u64,
    pub generator: GroupElement,
    /// `g^n (ag)^n`.
    pub a_prime: Sequence,
    /// `(g (ag)^{n-b}, g^{n-a} (ag), g^{a-1} (ag)^{b-1})`.
    pub triple: [Sequence; 3],
}

pub fn build_three_atom_witness(n: u64) -> Result<ThreeAtomWitness, CyclicEvenError> {
    if n % 2 != 0 || n < 4 {
        return Err(CyclicEvenError::OddOrder);
    }
    if is_prime(n + 1) {
        return Err(CyclicEvenError::NPlusOnePrime);
    }
    // smallest factor >= 3; n + 1 is odd and composite, so the cofactor is
    // also >= 3
    let a = (3..=n).find(|a| (n + 1) % a == 0).unwrap();
    let b = (n + 1) / a;
    debug_assert!(b >= 3);

    let spec = cyclic(n);
    let g = residue(&spec, 1);
    let ag = residue(&spec, a);
    let a_prime = Sequence::power_of(spec.clone(), g.clone(), n)
        .product(&Sequence::power_of(spec.clone(), ag.clone(), n));
    let triple = [
        Sequence::from_counts(spec.clone(), [(g.clone(), 1), (ag.clone(), n - b)]),
        Sequence::from_counts(spec.clone(), [(g.clone(), n - a), (ag.clone(), 1)]),
        Sequence::from_counts(spec.clone(), [(g.clone(), a - 1), (ag.clone(), b - 1)]),
    ];
    let product = triple[0].product(&triple[1]).product(&triple[2]);
    assert_eq!(product, a_prime, "three-atom product identity");
    for part in &triple {
        assert!(is_atom(part), "three-atom part {part} must be an atom");
    }
    Ok(ThreeAtomWitness {
        n,
        factor_a: a,
        factor_b: b,
        generator: g,
        a_prime,
        triple,
    })
}

/// The tail interval shifter `a* = ((-A') A')^l` with `l = M + max-distance`.
#[derive(Clone, Debug)]
pub struct TailShifter {
    pub n: u64,
    pub witness: ThreeAtomWitness,
    /// `(-A') A'`.
    pub base: Sequence,
    pub a_star: Sequence,
    pub bound_m: u64,
    pub max_delta: u64,
    pub exponent: u64,
    pub policy: String,
}

/// Builds the tail shifter. `m_policy` overrides the structural bound `M`;
/// by default both `M` and the maximum distance are taken empirically from
/// the length sets of the pair products `g^n (-g)^n` and of the base
/// sequence, and the policy used is recorded in the report.
pub fn build_tail_interval_shifter(
    n: u64,
    m_policy: Option<u64>,
) -> Result<TailShifter, CyclicEvenError> {
    let witness = build_three_atom_witness(n)?;
    let base = witness.a_prime.negate().product(&witness.a_prime);
    let spec = cyclic(n);

    let mut scanned: Vec<LengthSet> = spec
        .generators()
        .into_iter()
        .filter(|g| *g < spec.neg(g))
        .map(|g| {
            let pair = Sequence::power_of(spec.clone(), g.clone(), n)
                .product(&Sequence::power_of(spec.clone(), spec.neg(&g), n));
            length_set(&pair, &atoms_dividing(&pair)).unwrap()
        })
        .collect();
    scanned.push(length_set(&base, &atoms_dividing(&base)).unwrap());

    let deltas: BTreeSet<u64> = scanned.iter().flat_map(|l| l.delta()).collect();
    let max_delta = deltas.last().copied().unwrap_or(1);
    let (bound_m, policy) = match m_policy {
        Some(m) => (m, format!("caller-supplied bound {m}")),
        None => {
            let m = scanned
                .iter()
                .filter_map(|l| minimal_aamp_bound(l, &deltas).map(|(_, m)| m))
                .max()
                .unwrap_or(0);
            (
                m,
                format!(
                    "max over scanned pair/base length sets of the minimal \
                     progression bound (empirical distances {deltas:?})"
                ),
            )
        }
    };
    let exponent = bound_m + max_delta;
    let a_star = base.pow(exponent);
    Ok(TailShifter {
        n,
        witness,
        base,
        a_star,
        bound_m,
        max_delta,
        exponent,
        policy,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct TailOutcome {
    pub sample: Sequence,
    pub min: u64,
    pub max: u64,
    /// Whether the window `[min, max - M]` of the length set is an interval.
    pub window_interval: bool,
    pub elasticity: String,
    pub pass: bool,
}

/// Verification hook: for every maximal-elasticity sample `a`, the length
/// set of `a* a` restricted to `[min, max - M]` must be an interval and the
/// elasticity must equal `n/2`.
pub fn verify_tail_shifter(
    shifter: &TailShifter,
    samples: &[Sequence],
) -> Result<Vec<TailOutcome>, CyclicEvenError> {
    let n = shifter.n;
    for a in samples {
        if cyclic_max_elastic_form(a)
            .map_err(|_| CyclicEvenError::OddOrder)?
            .is_none()
        {
            // keep the tail check honest: non-maximal samples are a bug
            panic!("tail shifter sample {a} does not have maximal elasticity");
        }
    }
    let outcomes = samples
        .par_iter()
        .map(|a| {
            let product = shifter.a_star.product(a);
            let l = length_set(&product, &atoms_dividing(&product)).unwrap();
            // the lengths surviving the cutoff must be consecutive; lengths
            // lost above the cutoff are exactly what the bound absorbs
            let cutoff = l.max() - shifter.bound_m;
            let window: Vec<u64> = l.iter().filter(|&k| k <= cutoff).collect();
            let window_interval = !window.is_empty()
                && window.last().unwrap() - window[0] + 1 == window.len() as u64;
            let elasticity = l.elasticity();
            let pass = window_interval
                && elasticity == num_rational::Ratio::new(n, 2);
            TailOutcome {
                sample: a.clone(),
                min: l.min(),
                max: l.max(),
                window_interval,
                elasticity: rational_string(elasticity),
                pass,
            }
        })
        .collect();
    Ok(outcomes)
}

/// One solution of the cancellation equation: `k'` maximum-length atoms on
/// the left whose product also factors into `k' + 1` atoms on the right.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CancellationSolution {
    pub lhs: Vec<Sequence>,
    pub rhs: Vec<Sequence>,
    /// True when the right side reuses one of the left atoms, i.e. the two
    /// factorizations have nontrivial gcd and further cancellation applies.
    pub shares_atom: bool,
}

/// Machine-readable record that a bounded search space was fully explored.
#[derive(Clone, Debug)]
pub struct ExhaustionCertificate {
    pub n: u64,
    pub k: u64,
    /// Orbit-representative generator multisets examined.
    pub multisets_scanned: u64,
    /// DFS nodes visited.
    pub nodes: u64,
    pub exhausted: bool,
    pub solutions: Vec<CancellationSolution>,
    /// Whether the maximum-length stratum was cross-checked against the full
    /// catalog (small orders only).
    pub max_atom_form_verified: bool,
}

impl ExhaustionCertificate {
    /// Solutions with trivial gcd against the left side; these are the ones
    /// the cancellation equation is about.
    pub fn reduced_solutions(&self) -> Vec<&CancellationSolution> {
        self.solutions.iter().filter(|s| !s.shares_atom).collect()
    }

    pub fn to_json(&self) -> CertificateJson {
        let render = |sols: Vec<&CancellationSolution>| -> Vec<SolutionJson> {
            sols.iter()
                .map(|s| SolutionJson {
                    lhs: s.lhs.iter().map(|a| a.render()).collect(),
                    rhs: s.rhs.iter().map(|a| a.render()).collect(),
                })
                .collect()
        };
        CertificateJson {
            n: self.n,
            k: self.k,
            exhausted: self.exhausted,
            nodes: self.nodes,
            solutions: render(self.reduced_solutions()),
            search_space: self.multisets_scanned,
            solutions_with_shared_atoms: render(
                self.solutions.iter().filter(|s| s.shares_atom).collect(),
            ),
            max_atom_form_verified: self.max_atom_form_verified,
        }
    }
}

/// Wire form of a certificate; field order is part of the format.
#[derive(Serialize)]
pub struct CertificateJson {
    pub n: u64,
    pub k: u64,
    pub exhausted: bool,
    pub nodes: u64,
    pub solutions: Vec<SolutionJson>,
    pub search_space: u64,
    pub solutions_with_shared_atoms: Vec<SolutionJson>,
    pub max_atom_form_verified: bool,
}

#[derive(Serialize)]
pub struct SolutionJson {
    pub lhs: Vec<String>,
    pub rhs: Vec<String>,
}

/// For each `k' <= k_max`, exhaustively searches products of `k'`
/// maximum-length atoms for factorizations into `k' + 1` atoms. Generator
/// multisets are enumerated up to the unit action `g -> cg`, whose orbits
/// map solutions to solutions. The `budget` caps DFS nodes per `k'`;
/// truncated searches are reported with `exhausted: false` rather than as
/// errors.
pub fn remark54_search(
    n: u64,
    k_max: u64,
    budget: Option<u64>,
) -> Result<Vec<ExhaustionCertificate>, CyclicEvenError> {
    if n % 2 != 0 || n < 4 {
        return Err(CyclicEvenError::OddOrder);
    }
    let spec = cyclic(n);
    let max_atom_form_verified = if n <= 12 {
        let cat = enumerate_atoms(&spec, None);
        let stratum: BTreeSet<Sequence> = cat.max_length_atoms().into_iter().cloned().collect();
        let powers: BTreeSet<Sequence> = spec
            .generators()
            .into_iter()
            .map(|g| Sequence::power_of(spec.clone(), g, n))
            .collect();
        stratum == powers
    } else {
        false
    };

    let budget = budget.unwrap_or(u64::MAX);
    let mut certs = Vec::new();
    for k in 1..=k_max {
        let multisets = generator_multisets(n, k as usize);
        let per_multiset: Vec<(Vec<CancellationSolution>, u64, bool)> = multisets
            .par_iter()
            .map(|ms| search_one_multiset(&spec, ms, k, budget / multisets.len().max(1) as u64))
            .collect();
        let mut solutions = Vec::new();
        let mut nodes = 0;
        let mut exhausted = true;
        for (sols, node_count, done) in per_multiset {
            solutions.extend(sols);
            nodes += node_count;
            exhausted &= done;
        }
        certs.push(ExhaustionCertificate {
            n,
            k,
            multisets_scanned: multisets.len() as u64,
            nodes,
            exhausted,
            solutions,
            max_atom_form_verified,
        });
    }
    Ok(certs)
}

/// Sorted generator multisets of size `k`, one representative per orbit of
/// the unit action; every orbit has a representative containing 1.
pub fn generator_multisets(n: u64, k: usize) -> Vec<Vec<u64>> {
    let gens: Vec<u64> = units(n);
    let mut tuples: Vec<Vec<u64>> = Vec::new();
    let mut cur = vec![1u64];
    fn rec(gens: &[u64], cur: &mut Vec<u64>, k: usize, out: &mut Vec<Vec<u64>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        let last = *cur.last().unwrap();
        for &g in gens.iter().filter(|&&g| g >= last) {
            cur.push(g);
            rec(gens, cur, k, out);
            cur.pop();
        }
    }
    rec(&gens, &mut cur, k, &mut tuples);
    tuples.retain(|t| *t == canonical_multiset(t, n));
    tuples
}

/// The lexicographically smallest sorted image of the multiset under the
/// unit action.
pub fn canonical_multiset(ms: &[u64], n: u64) -> Vec<u64> {
    units(n)
        .into_iter()
        .map(|c| {
            let mut image: Vec<u64> = ms.iter().map(|g| g * c % n).collect();
            image.sort_unstable();
            image
        })
        .min()
        .unwrap()
}

fn search_one_multiset(
    spec: &GroupSpec,
    multiset: &[u64],
    k: u64,
    budget: u64,
) -> (Vec<CancellationSolution>, u64, bool) {
    let n = spec.order();
    let mut b = Sequence::empty(spec.clone());
    for &g in multiset {
        b = b.product(&Sequence::power_of(spec.clone(), residue(spec, g), n));
    }
    let rcat = atoms_dividing(&b);
    let lhs: Vec<Sequence> = multiset
        .iter()
        .map(|&g| Sequence::power_of(spec.clone(), residue(spec, g), n))
        .collect();
    let lhs_indices: BTreeSet<usize> =
        lhs.iter().map(|a| rcat.position(a).expect("g^n is an atom")).collect();

    let mut found: Vec<Vec<usize>> = Vec::new();
    let mut nodes = 0u64;
    let mut exhausted = true;
    let mut stack: Vec<usize> = Vec::new();
    rec_parts(
        &b,
        &rcat,
        0,
        (k + 1) as usize,
        &mut stack,
        &mut found,
        &mut nodes,
        budget,
        &mut exhausted,
    );
    let solutions = found
        .into_iter()
        .map(|idxs| CancellationSolution {
            lhs: lhs.clone(),
            rhs: idxs.iter().map(|&i| rcat.atom(i).clone()).collect(),
            shares_atom: idxs.iter().any(|i| lhs_indices.contains(i)),
        })
        .collect();
    (solutions, nodes, exhausted)
}

#[allow(clippy::too_many_arguments)]
fn rec_parts(
    resid: &Sequence,
    rcat: &crate::atoms::AtomCatalog,
    from: usize,
    parts_left: usize,
    stack: &mut Vec<usize>,
    found: &mut Vec<Vec<usize>>,
    nodes: &mut u64,
    budget: u64,
    exhausted: &mut bool,
) {
    *nodes += 1;
    if *nodes > budget {
        *exhausted = false;
        return;
    }
    if resid.is_empty() {
        if parts_left == 0 {
            found.push(stack.clone());
        }
        return;
    }
    if parts_left == 0 {
        return;
    }
    let len = resid.len();
    let n = resid.group().order();
    if len < 2 * parts_left as u64 || len > parts_left as u64 * n {
        return; // atoms over the nonzero elements have length in [2, n]
    }
    for i in from..rcat.len() {
        if !*exhausted {
            return;
        }
        let atom = rcat.atom(i);
        if atom.divides(resid) {
            stack.push(i);
            rec_parts(
                &resid.divide(atom).unwrap(),
                rcat,
                i,
                parts_left - 1,
                stack,
                found,
                nodes,
                budget,
                exhausted,
            );
            stack.pop();
        }
    }
}

/// Outcome of the search for a maximal-elasticity sequence whose minimal
/// length can be raised by one.
#[derive(Clone, Debug)]
pub struct OpenProblemOutcome {
    pub n: u64,
    pub max_k: u64,
    pub scanned: u64,
    /// A sequence with `min L + 1` in its length set, if one was found.
    pub witness: Option<(Sequence, Vec<u64>)>,
}

/// Searches maximal-elasticity sequences (products of at most `max_k`
/// maximum-length atoms, up to the unit action) for `min L + 1` in the
/// length set. Only meaningful when `n + 1` is prime; composite `n + 1`
/// always admits the three-atom solution.
pub fn open_problem_search(n: u64, max_k: u64) -> Result<OpenProblemOutcome, CyclicEvenError> {
    if n % 2 != 0 || n < 4 {
        return Err(CyclicEvenError::OddOrder);
    }
    if !is_prime(n + 1) {
        return Err(CyclicEvenError::NPlusOneComposite);
    }
    let spec = cyclic(n);
    let mut scanned = 0;
    // maximal-elasticity sequences are products of pairs g^n (-g)^n, so the
    // number of maximum-length atom factors is 2 * (number of pairs)
    for pairs in 1..=(max_k / 2) {
        for ms in pair_multisets(&spec, pairs as usize) {
            scanned += 1;
            let mut a = Sequence::empty(spec.clone());
            for &g in &ms {
                let gen = residue(&spec, g);
                a = a
                    .product(&Sequence::power_of(spec.clone(), gen.clone(), n))
                    .product(&Sequence::power_of(spec.clone(), spec.neg(&gen), n));
            }
            let l = length_set(&a, &atoms_dividing(&a)).unwrap();
            debug_assert_eq!(l.min(), 2 * pairs);
            if l.contains(l.min() + 1) {
                return Ok(OpenProblemOutcome {
                    n,
                    max_k,
                    scanned,
                    witness: Some((a, l.iter().collect())),
                });
            }
        }
    }
    Ok(OpenProblemOutcome {
        n,
        max_k,
        scanned,
        witness: None,
    })
}

/// Multisets of generator pairs `{g, -g}` (represented by the smaller
/// member), one per orbit of the unit action.
fn pair_multisets(spec: &GroupSpec, count: usize) -> Vec<Vec<u64>> {
    let n = spec.order();
    let reps: Vec<u64> = units(n).into_iter().filter(|&g| g < n - g).collect();
    let mut tuples = Vec::new();
    let mut cur: Vec<u64> = Vec::new();
    fn rec(reps: &[u64], from: usize, cur: &mut Vec<u64>, count: usize, out: &mut Vec<Vec<u64>>) {
        if cur.len() == count {
            out.push(cur.clone());
            return;
        }
        for (i, &g) in reps.iter().enumerate().skip(from) {
            cur.push(g);
            rec(reps, i, cur, count, out);
            cur.pop();
        }
    }
    rec(&reps, 0, &mut cur, count, &mut tuples);
    tuples.retain(|t| *t == canonical_pair_multiset(t, n));
    tuples
}

fn canonical_pair_multiset(ms: &[u64], n: u64) -> Vec<u64> {
    units(n)
        .into_iter()
        .map(|c| {
            let mut image: Vec<u64> = ms
                .iter()
                .map(|g| {
                    let x = g * c % n;
                    x.min(n - x)
                })
                .collect();
            image.sort_unstable();
            image
        })
        .min()
        .unwrap()
}
