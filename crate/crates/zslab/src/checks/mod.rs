//! The built-in verification suite.
//!
//! Every check pins one expected property of the toolkit — davenport values,
//! oracle agreement, shifter conclusions, exhaustion results — at fixed
//! desk-scale bounds. The `paper-checks` command and the acceptance test
//! target both run this module, so a criterion has exactly one
//! implementation.

pub mod oracle;

use std::collections::BTreeSet;
use std::time::Instant;

use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::{GroupSpec, Sequence};
use crate::atoms::{atoms_dividing, d_star, enumerate_atoms};
use crate::cyclic_even;
use crate::elasticity::{brho_census, enumerate_brho_atoms, is_max_elastic};
use crate::factorize::{
    aamp::minimal_aamp_bound, catenary_degree, enumerate_factorizations, length_set, rho_k,
};
use crate::property_p::{
    build_catenary_shifter, build_interval_shifter, check_property_p, check_property_p_star,
    default_samples, verify_shifter, witness_is_valid, ShifterMode,
};

#[derive(Clone, Debug)]
pub struct CheckConfig {
    /// Restrict multi-row checks to one group where applicable.
    pub group: Option<GroupSpec>,
    /// Run the long opt-in searches as well.
    pub deep: bool,
    /// Seed for the randomized sampling checks.
    pub seed: u64,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            group: None,
            deep: false,
            seed: 1,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CheckOutcome {
    pub id: &'static str,
    pub pass: bool,
    pub detail: String,
    pub millis: u128,
}

type CheckFn = fn(&CheckConfig) -> (bool, String);

pub fn registry() -> Vec<(&'static str, CheckFn)> {
    vec![
        ("davenport-table", davenport_table),
        ("atom-oracle", atom_oracle),
        ("max-elastic-criterion", max_elastic_criterion),
        ("length-additivity", length_additivity),
        ("rhok-table", rhok_table),
        ("property-table", property_table),
        ("interval-shifter", interval_shifter),
        ("catenary-shifter", catenary_shifter),
        ("even-no-penultimate", even_no_penultimate),
        ("three-atom-witness", three_atom_witness),
        ("cancellation-search", cancellation_search),
        ("catenary-bound", catenary_bound),
        ("aamp-structure", aamp_structure),
        ("census", census),
    ]
}

/// Runs every check whose id contains `only` (all of them when `None`).
pub fn run(cfg: &CheckConfig, only: Option<&str>) -> Vec<CheckOutcome> {
    registry()
        .into_iter()
        .filter(|(id, _)| only.is_none_or(|o| id.contains(o)))
        .map(|(id, f)| {
            let start = Instant::now();
            let (pass, detail) = f(cfg);
            CheckOutcome {
                id,
                pass,
                detail,
                millis: start.elapsed().as_millis(),
            }
        })
        .collect()
}

pub fn run_one(id: &str, cfg: &CheckConfig) -> Option<CheckOutcome> {
    run(cfg, Some(id)).into_iter().find(|o| o.id == id)
}

fn keep(cfg: &CheckConfig, name: &str) -> bool {
    match &cfg.group {
        None => true,
        Some(g) => GroupSpec::parse(name).map(|h| h == *g).unwrap_or(false),
    }
}

fn davenport_table(cfg: &CheckConfig) -> (bool, String) {
    let mut rows: Vec<(String, u64)> = (2..=12).map(|n| (format!("C{n}"), n)).collect();
    rows.extend([
        ("C2xC2".to_string(), 3),
        ("C2xC2xC2".to_string(), 4),
        ("C2xC2xC2xC2".to_string(), 5),
        ("C3xC3".to_string(), 5),
        ("C2xC2xC4".to_string(), 6),
    ]);
    let mut pass = true;
    let mut notes = Vec::new();
    for (name, want) in rows {
        if !keep(cfg, &name) {
            continue;
        }
        let spec = GroupSpec::parse(&name).unwrap();
        let start = Instant::now();
        let cat = enumerate_atoms(&spec, None);
        let elapsed = start.elapsed();
        let d = cat.davenport();
        let ok = d == want && d_star(&spec) == d && elapsed.as_secs() < 10;
        pass &= ok;
        if !ok {
            notes.push(format!(
                "{name}: D={d} want {want}, closed form {} ({:?})",
                d_star(&spec),
                elapsed
            ));
        }
    }
    if notes.is_empty() {
        notes.push("all rows agree with the closed form within time".into());
    }
    (pass, notes.join("; "))
}

fn atom_oracle(cfg: &CheckConfig) -> (bool, String) {
    let mut pass = true;
    let mut notes = Vec::new();
    for name in ["C3", "C4", "C5", "C2xC2"] {
        if !keep(cfg, name) {
            continue;
        }
        let spec = GroupSpec::parse(name).unwrap();
        let cat = enumerate_atoms(&spec, None);
        let got: BTreeSet<Sequence> = cat.atoms().iter().cloned().collect();
        // one beyond the observed maximum, to catch anything missed there
        let want = oracle::naive_atoms(&spec, cat.max_length() + 1);
        let ok = got == want;
        pass &= ok;
        notes.push(format!(
            "{name}: {} atoms{}",
            got.len(),
            if ok { "" } else { " MISMATCH" }
        ));
    }
    (pass, notes.join(", "))
}

fn max_elastic_criterion(cfg: &CheckConfig) -> (bool, String) {
    let mut pass = true;
    let mut notes = Vec::new();
    for name in ["C3", "C4"] {
        if !keep(cfg, name) {
            continue;
        }
        let spec = GroupSpec::parse(name).unwrap();
        let cat = enumerate_atoms(&spec, None);
        let rho = Ratio::new(cat.davenport(), 2);
        let mut checked = 0u64;
        let mut agree = true;
        for b in oracle::zero_sum_sequences(&spec, 12) {
            if b.is_empty() {
                continue;
            }
            checked += 1;
            let by_cert = is_max_elastic(&b, &cat).is_some();
            let by_rho = length_set(&b, &cat).unwrap().elasticity() == rho;
            if by_cert != by_rho {
                agree = false;
                notes.push(format!("{name}: disagreement at {b}"));
            }
        }
        pass &= agree;
        notes.push(format!("{name}: {checked} sequences"));
    }
    (pass, notes.join(", "))
}

fn length_additivity(cfg: &CheckConfig) -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let pools: Vec<(GroupSpec, crate::atoms::AtomCatalog, Vec<Sequence>)> = ["C3", "C4", "C5"]
        .iter()
        .map(|name| {
            let spec = GroupSpec::parse(name).unwrap();
            let cat = enumerate_atoms(&spec, None);
            let pool = crate::elasticity::enumerate_max_elastic(&cat, 6 * cat.davenport());
            (spec, cat, pool)
        })
        .collect();
    let mut pass = true;
    let mut failures = 0;
    for i in 0..50 {
        let (_, cat, pool) = &pools[i % pools.len()];
        let a = pool.choose(&mut rng).unwrap();
        let b = pool.choose(&mut rng).unwrap();
        let la = length_set(a, cat).unwrap();
        let lb = length_set(b, cat).unwrap();
        let lab = length_set(&a.product(b), cat).unwrap();
        if lab.min() != la.min() + lb.min() || lab.max() != la.max() + lb.max() {
            pass = false;
            failures += 1;
        }
    }
    (
        pass,
        format!("50 seeded pairs, {failures} additivity failures"),
    )
}

fn rhok_table(cfg: &CheckConfig) -> (bool, String) {
    let mut pass = true;
    let mut notes = Vec::new();
    for n in [3u64, 4, 5, 6] {
        let name = format!("C{n}");
        if !keep(cfg, &name) {
            continue;
        }
        let spec = GroupSpec::parse(&name).unwrap();
        let cat = enumerate_atoms(&spec, None);
        let r2 = rho_k(&cat, 2, 50_000_000).unwrap();
        let r3 = rho_k(&cat, 3, 50_000_000).unwrap();
        let ok = r2.exhaustive && r3.exhaustive && r2.value == n && r3.value == n + 1;
        pass &= ok;
        notes.push(format!(
            "rho_2({name})={} rho_3({name})={}{}",
            r2.value,
            r3.value,
            if ok { "" } else { " MISMATCH" }
        ));
    }
    (pass, notes.join(", "))
}

fn property_table(cfg: &CheckConfig) -> (bool, String) {
    let p_expect = [
        ("C3", true),
        ("C5", true),
        ("C7", true),
        ("C9", true),
        ("C2xC2", true),
        ("C3xC3", true),
        ("C2xC4", true),
        ("C4", false),
        ("C6", false),
        ("C8", false),
    ];
    let pstar_expect = [
        ("C3", true),
        ("C5", true),
        ("C2xC2", true),
        ("C3xC3", true),
        ("C4", false),
        ("C6", false),
    ];
    let mut pass = true;
    let mut notes = Vec::new();
    for (name, want) in p_expect {
        if !keep(cfg, name) {
            continue;
        }
        let cat = enumerate_atoms(&GroupSpec::parse(name).unwrap(), None);
        let witness = check_property_p(&cat).unwrap();
        let got = witness.is_some();
        let valid = witness.map(|w| witness_is_valid(&cat, &w)).unwrap_or(true);
        if got != want || !valid {
            pass = false;
            notes.push(format!("P({name})={got} want {want}"));
        }
    }
    for (name, want) in pstar_expect {
        if !keep(cfg, name) {
            continue;
        }
        let cat = enumerate_atoms(&GroupSpec::parse(name).unwrap(), None);
        let got = check_property_p_star(&cat).is_some();
        if got != want {
            pass = false;
            notes.push(format!("P*({name})={got} want {want}"));
        }
    }
    if notes.is_empty() {
        notes.push("all P/P* rows as expected".into());
    }
    (pass, notes.join(", "))
}

fn interval_shifter(cfg: &CheckConfig) -> (bool, String) {
    let mut pass = true;
    let mut notes = Vec::new();
    for name in ["C3", "C5"] {
        if !keep(cfg, name) {
            continue;
        }
        let cat = enumerate_atoms(&GroupSpec::parse(name).unwrap(), None);
        let shifter = build_interval_shifter(&cat, None, None).unwrap();
        let samples = default_samples(&cat);
        let report = verify_shifter(
            &cat,
            &shifter.a_star,
            &samples,
            ShifterMode::Interval,
            20_000,
        )
        .unwrap();
        pass &= report.all_pass;
        notes.push(format!(
            "{name}: k={}, {} samples{}",
            shifter.k,
            report.samples.len(),
            if report.all_pass { "" } else { " FAIL" }
        ));
    }
    (pass, notes.join(", "))
}

fn catenary_shifter(cfg: &CheckConfig) -> (bool, String) {
    let mut pass = true;
    let mut notes = Vec::new();
    for name in ["C3", "C2xC2"] {
        if !keep(cfg, name) {
            continue;
        }
        let cat = enumerate_atoms(&GroupSpec::parse(name).unwrap(), None);
        let (a_star, _) = build_catenary_shifter(&cat).unwrap();
        let samples = default_samples(&cat);
        let report = verify_shifter(
            &cat,
            &a_star,
            &samples,
            ShifterMode::Catenary3,
            20_000,
        )
        .unwrap();
        pass &= report.all_pass;
        let worst = report
            .samples
            .iter()
            .filter_map(|s| s.catenary)
            .max()
            .unwrap_or(0);
        notes.push(format!(
            "{name}: {} samples, max catenary {}{}",
            report.samples.len(),
            worst,
            if report.all_pass { "" } else { " FAIL" }
        ));
    }
    (pass, notes.join(", "))
}

fn even_no_penultimate(cfg: &CheckConfig) -> (bool, String) {
    let mut pass = true;
    let mut notes = Vec::new();
    for (n, max_card) in [(4u64, 32u64), (6, 24)] {
        if !keep(cfg, &format!("C{n}")) {
            continue;
        }
        let report = cyclic_even::verify_no_penultimate(n, max_card).unwrap();
        pass &= report.holds() && report.stratum_verified;
        notes.push(format!(
            "n={n}: {} sequences, {} counterexamples",
            report.checked,
            report.counterexamples.len()
        ));
    }
    if keep(cfg, "C3") {
        // odd-order contrast: the same scan must find a counterexample
        let contrast = cyclic_even::penultimate_scan(3, 12);
        pass &= !contrast.holds();
        notes.push(format!(
            "n=3 contrast: {} counterexamples (expected > 0)",
            contrast.counterexamples.len()
        ));
    }
    (pass, notes.join(", "))
}

fn three_atom_witness(cfg: &CheckConfig) -> (bool, String) {
    let mut pass = true;
    let mut notes = Vec::new();
    for n in [8u64, 14] {
        if !keep(cfg, &format!("C{n}")) {
            continue;
        }
        let w = cyclic_even::build_three_atom_witness(n).unwrap();
        let base = w.a_prime.negate().product(&w.a_prime);
        let l = length_set(&base, &atoms_dividing(&base)).unwrap();
        let ok = l.contains(l.min() + 1) && (n != 8 || l.min() == 4);
        pass &= ok;
        notes.push(format!(
            "n={n}: triple {}, min L = {}{}",
            w.triple
                .iter()
                .map(|a| a.render())
                .collect::<Vec<_>>()
                .join(" | "),
            l.min(),
            if ok { "" } else { " FAIL" }
        ));
    }
    (pass, notes.join("; "))
}

fn cancellation_search(cfg: &CheckConfig) -> (bool, String) {
    let mut pass = true;
    let mut notes = Vec::new();
    if keep(cfg, "C12") {
        let certs = cyclic_even::remark54_search(12, 2, None).unwrap();
        let ok = certs
            .iter()
            .all(|c| c.exhausted && c.reduced_solutions().is_empty());
        pass &= ok;
        notes.push(format!(
            "n=12 k<=2: exhausted with no solutions over {} nodes{}",
            certs.iter().map(|c| c.nodes).sum::<u64>(),
            if ok { "" } else { " FAIL" }
        ));
        if cfg.deep {
            let deep = cyclic_even::remark54_search(12, 3, None).unwrap();
            let k3 = &deep[2];
            let ok = k3.exhausted && k3.reduced_solutions().is_empty();
            pass &= ok;
            notes.push(format!(
                "n=12 k=3 (deep): exhausted={} solutions={} nodes={}",
                k3.exhausted,
                k3.reduced_solutions().len(),
                k3.nodes
            ));
        }
    }
    if keep(cfg, "C8") {
        let certs = cyclic_even::remark54_search(8, 2, None).unwrap();
        let found = certs[1]
            .reduced_solutions()
            .iter()
            .any(|s| {
                let rhs: BTreeSet<String> = s.rhs.iter().map(|a| a.render()).collect();
                rhs == BTreeSet::from(["1+3^5".into(), "1^5+3".into(), "1^2+3^2".into()])
            });
        pass &= certs[1].exhausted && found;
        notes.push(format!(
            "n=8 k=2: three-atom solution {}",
            if found { "found" } else { "MISSING" }
        ));
    }
    (pass, notes.join("; "))
}

fn catenary_bound(cfg: &CheckConfig) -> (bool, String) {
    let mut pass = true;
    let mut notes = Vec::new();
    for name in ["C3", "C4"] {
        if !keep(cfg, name) {
            continue;
        }
        let spec = GroupSpec::parse(name).unwrap();
        let cat = enumerate_atoms(&spec, None);
        let mut checked = 0u64;
        for b in oracle::zero_sum_sequences(&spec, 12) {
            if b.is_empty() {
                continue;
            }
            let zs = enumerate_factorizations(&b, &cat, Some(100_000)).unwrap();
            if zs.len() < 2 {
                continue;
            }
            let c = catenary_degree(&b, &cat, 100_000).unwrap();
            let max_gap = length_set(&b, &cat)
                .unwrap()
                .delta()
                .last()
                .copied()
                .unwrap_or(0);
            checked += 1;
            if c < 2 + max_gap {
                pass = false;
                notes.push(format!("{name}: c({b}) = {c} < 2 + {max_gap}"));
            }
        }
        notes.push(format!("{name}: {checked} sequences with |Z| >= 2"));
    }
    (pass, notes.join(", "))
}

fn aamp_structure(cfg: &CheckConfig) -> (bool, String) {
    let mut pass = true;
    let mut notes = Vec::new();
    for name in ["C3", "C4"] {
        if !keep(cfg, name) {
            continue;
        }
        let spec = GroupSpec::parse(name).unwrap();
        let cat = enumerate_atoms(&spec, None);
        let sets: Vec<crate::factorize::LengthSet> = oracle::zero_sum_sequences(&spec, 12)
            .iter()
            .filter(|b| !b.is_empty())
            .map(|b| length_set(b, &cat).unwrap())
            .collect();
        let deltas: BTreeSet<u64> = sets.iter().flat_map(|l| l.delta()).collect();
        let mut worst = 0u64;
        for l in &sets {
            match minimal_aamp_bound(l, &deltas) {
                Some((_, m)) if m <= 2 => worst = worst.max(m),
                other => {
                    pass = false;
                    notes.push(format!("{name}: {:?} needs {other:?}", l.iter().collect::<Vec<_>>()));
                }
            }
        }
        notes.push(format!(
            "{name}: {} length sets, distances {:?}, max bound {}",
            sets.len(),
            deltas,
            worst
        ));
    }
    (pass, notes.join("; "))
}

fn census(cfg: &CheckConfig) -> (bool, String) {
    let mut pass = true;
    let mut notes = Vec::new();
    if keep(cfg, "C3") {
        let cat = enumerate_atoms(&GroupSpec::parse("C3").unwrap(), None);
        let brho = enumerate_brho_atoms(&cat, 4);
        let table = brho_census(&brho, 10, 1, 1);
        let ok = table.rows.iter().all(|r| r.omega == 1) && ratios_monotone(&table);
        pass &= ok;
        notes.push(format!("C3: omega constant 1 {}", if ok { "ok" } else { "FAIL" }));
    }
    if keep(cfg, "C5") {
        let cat = enumerate_atoms(&GroupSpec::parse("C5").unwrap(), None);
        let brho = enumerate_brho_atoms(&cat, 4);
        let table = brho_census(&brho, 10, 1, 1);
        let omegas: Vec<u64> = table.rows.iter().map(|r| r.omega).collect();
        let linear = table
            .rows
            .iter()
            .all(|r| r.omega == r.n + 1);
        // third finite differences of a linear sequence vanish
        let third_diffs_vanish = omegas
            .windows(4)
            .all(|w| w[3] + 3 * w[1] == 3 * w[2] + w[0]);
        let ok = linear && third_diffs_vanish && ratios_monotone(&table);
        pass &= ok;
        notes.push(format!(
            "C5: omega = n+1 {}, third differences vanish {}",
            linear, third_diffs_vanish
        ));
    }
    (pass, notes.join("; "))
}

fn ratios_monotone(table: &crate::elasticity::CensusTable) -> bool {
    let shift: Vec<Ratio<u64>> = table.rows.iter().filter_map(|r| r.ratio_shift).collect();
    let cumulative: Vec<Ratio<u64>> = table
        .rows
        .iter()
        .filter_map(|r| r.ratio_cumulative)
        .collect();
    let mono = |v: &[Ratio<u64>]| {
        v.windows(2).all(|w| w[0] <= w[1]) && v.iter().all(|r| *r <= Ratio::from_integer(1))
    };
    mono(&shift) && mono(&cumulative)
}
