//! Command-line interface to the zslab factorization laboratory.
//!
//! Exit codes: 0 on success, 1 when a verification or search reports a
//! failure, 2 on malformed input.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use zslab::algebra::{GroupSpec, Sequence};
use zslab::atoms::{cache, AtomCatalog};
use zslab::checks::{run as run_checks, CheckConfig};
use zslab::cyclic_even;
use zslab::elasticity::{brho_census, enumerate_brho_atoms, enumerate_max_elastic};
use zslab::factorize::{catenary_degree, length_set, rational_string, rho_k, LengthSetReport};
use zslab::property_p::{
    build_catenary_shifter, build_interval_shifter, default_samples, verify_shifter,
    PropertyError, PropertyReport, ShifterMode,
};

#[derive(Parser)]
#[command(
    name = "zslab",
    version,
    about = "Exact-arithmetic toolkit for zero-sum sequences and factorization invariants over finite abelian groups"
)]
struct Cli {
    /// Cache directory for atom catalogs; the ZSLAB_CACHE environment
    /// variable overrides this flag
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,

    /// Worker threads for the parallel searches
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,

    /// Output format where a command supports both
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Seed for randomized sampling inside the verification suite
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Interval,
    Catenary3,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate the atom catalog of a group (cached on disk)
    Atoms {
        #[arg(long)]
        group: String,
        /// Truncate the enumeration at this atom length
        #[arg(long)]
        max_len: Option<u64>,
        /// Recompute even if a cache file exists
        #[arg(long)]
        no_cache: bool,
    },
    /// Print the Davenport constant
    Davenport {
        #[arg(long)]
        group: String,
    },
    /// Length set of a zero-sum sequence, as a JSON report
    Lengths {
        #[arg(long)]
        group: String,
        #[arg(long)]
        seq: String,
    },
    /// Catenary degree of a zero-sum sequence
    Catenary {
        #[arg(long)]
        group: String,
        #[arg(long)]
        seq: String,
        /// Cap on the number of factorizations materialized
        #[arg(long, default_value_t = 20_000)]
        cap: usize,
    },
    /// k-th elasticity via bounded search over atom products
    Rhok {
        #[arg(long)]
        group: String,
        #[arg(long)]
        k: u64,
        /// Node cap for the search
        #[arg(long, default_value_t = 50_000_000)]
        cap: u64,
    },
    /// Enumerate maximal-elasticity sequences up to a cardinality bound
    Maxelastic {
        #[arg(long)]
        group: String,
        /// Defaults to four times the Davenport constant
        #[arg(long)]
        max_card: Option<u64>,
    },
    /// Generating set of the maximal-elasticity submonoid
    Brho {
        #[arg(long)]
        group: String,
        /// Search depth in maximum-length atom factors
        #[arg(long, default_value_t = 4)]
        degree_bound: u64,
    },
    /// Growth census of the maximal-elasticity submonoid (TSV)
    Census {
        #[arg(long)]
        group: String,
        #[arg(long, default_value_t = 10)]
        nmax: u64,
        /// Shift in the product-count ratio column
        #[arg(long, default_value_t = 1)]
        k0: u64,
        /// Shift in the cumulative-count ratio column
        #[arg(long, default_value_t = 1)]
        alpha: u64,
        #[arg(long, default_value_t = 4)]
        degree_bound: u64,
    },
    /// Decide properties P and P* and print witnesses
    #[command(name = "property-p")]
    PropertyP {
        #[arg(long)]
        group: String,
    },
    /// Build a shifter and verify its conclusion on samples
    Shifter {
        #[arg(long)]
        group: String,
        #[arg(long, value_enum, default_value_t = Mode::Interval)]
        mode: Mode,
        /// Override the empirical distance bound (interval mode)
        #[arg(long)]
        delta_bound: Option<u64>,
        /// Cardinality bound of the distance scan (interval mode)
        #[arg(long)]
        scan_card: Option<u64>,
        /// Cardinality bound for the verification samples
        #[arg(long)]
        max_sample_card: Option<u64>,
        #[arg(long, default_value_t = 20_000)]
        cap: usize,
    },
    /// Even-order cyclic checks: penultimate length, three-atom witness,
    /// tail shifter, open-problem search
    #[command(name = "even-cyclic")]
    EvenCyclic {
        #[arg(long)]
        n: u64,
        /// Cardinality bound for the penultimate scan (default 8n)
        #[arg(long)]
        max_card: Option<u64>,
        /// Override the empirical tail bound M
        #[arg(long)]
        m_policy: Option<u64>,
        /// Atom-factor bound for the open-problem search
        #[arg(long, default_value_t = 4)]
        max_k: u64,
    },
    /// Exhaustive cancellation search with exhaustion certificates
    Remark54 {
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 2)]
        kmax: u64,
        /// DFS node budget per certificate
        #[arg(long)]
        budget: Option<u64>,
        /// Also write the certificates to this file
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the built-in verification suite
    #[command(name = "paper-checks")]
    PaperChecks {
        /// Only run checks whose id contains this string
        #[arg(long)]
        only: Option<String>,
        /// Restrict multi-row checks to one group
        #[arg(long)]
        group: Option<String>,
        /// Include the long opt-in searches
        #[arg(long)]
        deep: bool,
    },
}

struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: 2,
            message: message.into(),
        }
    }

    fn failure(message: impl Into<String>) -> Self {
        CliError {
            code: 1,
            message: message.into(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs)
        .build_global();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn cache_dir(cli: &Cli) -> PathBuf {
    std::env::var_os("ZSLAB_CACHE")
        .map(PathBuf::from)
        .or_else(|| cli.cache_dir.clone())
        .unwrap_or_else(|| PathBuf::from(".zslab-cache"))
}

fn parse_group(text: &str) -> Result<GroupSpec, CliError> {
    let spec = GroupSpec::parse(text).map_err(|e| CliError::usage(e.to_string()))?;
    if spec.order() > 4096 {
        return Err(CliError::usage(format!(
            "group of order {} is beyond the enumeration range of this tool",
            spec.order()
        )));
    }
    Ok(spec)
}

fn catalog(cli: &Cli, group: &str, max_len: Option<u64>) -> Result<AtomCatalog, CliError> {
    let spec = parse_group(group)?;
    let (cat, hit) = cache::load_or_compute(&spec, max_len, &cache_dir(cli));
    if hit {
        eprintln!("atom catalog for {} loaded from cache", spec.canonical_name());
    }
    Ok(cat)
}

fn parse_sequence(spec: &GroupSpec, text: &str) -> Result<Sequence, CliError> {
    Sequence::parse(spec, text).map_err(|e| CliError::usage(e.to_string()))
}

fn run(cli: &Cli) -> Result<u8, CliError> {
    match &cli.command {
        Command::Atoms {
            group,
            max_len,
            no_cache,
        } => {
            let cat = if *no_cache {
                zslab::enumerate_atoms(&parse_group(group)?, *max_len)
            } else {
                catalog(cli, group, *max_len)?
            };
            if cli.format == Some(Format::Json) {
                let body = json!({
                    "group": cat.group().canonical_name(),
                    "complete": cat.is_complete(),
                    "max_length": cat.max_length(),
                    "atoms": cat.atoms().iter().map(|a| a.render()).collect::<Vec<_>>(),
                });
                println!("{body}");
            } else {
                print!("{}", cache::render(&cat));
            }
            Ok(0)
        }
        Command::Davenport { group } => {
            let cat = catalog(cli, group, None)?;
            println!("{}", cat.davenport());
            Ok(0)
        }
        Command::Lengths { group, seq } => {
            let cat = catalog(cli, group, None)?;
            let b = parse_sequence(cat.group(), seq)?;
            let l = length_set(&b, &cat).map_err(|e| CliError::usage(e.to_string()))?;
            let report = LengthSetReport::new(&b, &l);
            println!("{}", serde_json::to_string(&report).unwrap());
            Ok(0)
        }
        Command::Catenary { group, seq, cap } => {
            let cat = catalog(cli, group, None)?;
            let b = parse_sequence(cat.group(), seq)?;
            let c = catenary_degree(&b, &cat, *cap)
                .map_err(|e| CliError::failure(e.to_string()))?;
            if cli.format == Some(Format::Json) {
                println!(
                    "{}",
                    json!({"group": cat.group().canonical_name(), "sequence": b.render(), "catenary": c})
                );
            } else {
                println!("{c}");
            }
            Ok(0)
        }
        Command::Rhok { group, k, cap } => {
            if *k < 1 {
                return Err(CliError::usage("--k must be at least 1"));
            }
            let cat = catalog(cli, group, None)?;
            let out = rho_k(&cat, *k, *cap).map_err(|e| CliError::failure(e.to_string()))?;
            if cli.format == Some(Format::Json) {
                println!(
                    "{}",
                    json!({
                        "group": cat.group().canonical_name(),
                        "k": k,
                        "value": out.value,
                        "exhaustive": out.exhaustive,
                        "witness": out.witness.map(|w| w.render()),
                    })
                );
            } else {
                println!("{} (exhaustive: {})", out.value, out.exhaustive);
            }
            Ok(0)
        }
        Command::Maxelastic { group, max_card } => {
            let cat = catalog(cli, group, None)?;
            let bound = max_card.unwrap_or(4 * cat.davenport());
            let found = enumerate_max_elastic(&cat, bound);
            if cli.format == Some(Format::Json) {
                println!(
                    "{}",
                    json!({
                        "group": cat.group().canonical_name(),
                        "max_card": bound,
                        "sequences": found.iter().map(|s| s.render()).collect::<Vec<_>>(),
                    })
                );
            } else {
                for s in &found {
                    println!("{}", s.render());
                }
            }
            Ok(0)
        }
        Command::Brho {
            group,
            degree_bound,
        } => {
            let cat = catalog(cli, group, None)?;
            let brho = enumerate_brho_atoms(&cat, *degree_bound);
            if cli.format == Some(Format::Json) {
                println!(
                    "{}",
                    json!({
                        "group": brho.group.canonical_name(),
                        "degree_bound": brho.degree_bound,
                        "certified_complete": brho.certified_complete,
                        "generators": brho.generators.iter().map(|s| s.render()).collect::<Vec<_>>(),
                    })
                );
            } else {
                println!(
                    "generators up to degree {} (certified complete: {})",
                    brho.degree_bound, brho.certified_complete
                );
                for g in &brho.generators {
                    println!("{}", g.render());
                }
            }
            Ok(0)
        }
        Command::Census {
            group,
            nmax,
            k0,
            alpha,
            degree_bound,
        } => {
            let cat = catalog(cli, group, None)?;
            let brho = enumerate_brho_atoms(&cat, *degree_bound);
            if brho.generators.is_empty() {
                return Err(CliError::failure(
                    "no maximal-elasticity generators found for this group",
                ));
            }
            let table = brho_census(&brho, *nmax, *k0, *alpha);
            println!("n\tomega_count\tcumulative_count\tratio_shift_k0\tratio_cumulative_alpha");
            for row in &table.rows {
                let shift = row
                    .ratio_shift
                    .map(rational_string)
                    .unwrap_or_else(|| "-".into());
                let cumulative = row
                    .ratio_cumulative
                    .map(rational_string)
                    .unwrap_or_else(|| "-".into());
                println!(
                    "{}\t{}\t{}\t{}\t{}",
                    row.n, row.omega, row.cumulative, shift, cumulative
                );
            }
            Ok(0)
        }
        Command::PropertyP { group } => {
            let cat = catalog(cli, group, None)?;
            let report = PropertyReport::new(&cat).map_err(|e| match e {
                PropertyError::GroupTooSmall => CliError::usage(e.to_string()),
                other => CliError::failure(other.to_string()),
            })?;
            println!("{}", serde_json::to_string(&report).unwrap());
            Ok(0)
        }
        Command::Shifter {
            group,
            mode,
            delta_bound,
            scan_card,
            max_sample_card,
            cap,
        } => {
            let cat = catalog(cli, group, None)?;
            let samples = match max_sample_card {
                None => default_samples(&cat),
                Some(bound) => enumerate_max_elastic(&cat, *bound),
            };
            let (a_star, extra) = match mode {
                Mode::Interval => {
                    let shifter = build_interval_shifter(&cat, *delta_bound, *scan_card)
                        .map_err(|e| CliError::failure(e.to_string()))?;
                    let extra = json!({
                        "seed": shifter.a_prime.render(),
                        "k": shifter.k,
                        "delta_policy": shifter.delta_policy,
                    });
                    (shifter.a_star, extra)
                }
                Mode::Catenary3 => {
                    let (a_star, _) = build_catenary_shifter(&cat)
                        .map_err(|e| CliError::failure(e.to_string()))?;
                    (a_star, json!({}))
                }
            };
            let report = verify_shifter(
                &cat,
                &a_star,
                &samples,
                match mode {
                    Mode::Interval => ShifterMode::Interval,
                    Mode::Catenary3 => ShifterMode::Catenary3,
                },
                *cap,
            )
            .map_err(|e| CliError::failure(e.to_string()))?;
            let body = json!({
                "group": cat.group().canonical_name(),
                "construction": extra,
                "report": report,
            });
            println!("{}", serde_json::to_string(&body).unwrap());
            Ok(if report.all_pass { 0 } else { 1 })
        }
        Command::EvenCyclic {
            n,
            max_card,
            m_policy,
            max_k,
        } => even_cyclic_command(*n, *max_card, *m_policy, *max_k),
        Command::Remark54 {
            n,
            kmax,
            budget,
            out,
        } => {
            let certs = cyclic_even::remark54_search(*n, *kmax, *budget)
                .map_err(|e| CliError::usage(e.to_string()))?;
            let body: Vec<_> = certs.iter().map(|c| c.to_json()).collect();
            let rendered = serde_json::to_string_pretty(&body).unwrap();
            if let Some(path) = out {
                std::fs::write(path, &rendered)
                    .map_err(|e| CliError::failure(format!("writing {}: {e}", path.display())))?;
            }
            println!("{rendered}");
            Ok(0)
        }
        Command::PaperChecks { only, group, deep } => {
            let cfg = CheckConfig {
                group: match group {
                    None => None,
                    Some(g) => Some(parse_group(g)?),
                },
                deep: *deep,
                seed: cli.seed,
            };
            let outcomes = run_checks(&cfg, only.as_deref());
            if outcomes.is_empty() {
                return Err(CliError::usage("no check matches the --only filter"));
            }
            let mut all_pass = true;
            for o in &outcomes {
                println!(
                    "{} {:<24} {:>7} ms  {}",
                    if o.pass { "PASS" } else { "FAIL" },
                    o.id,
                    o.millis,
                    o.detail
                );
                all_pass &= o.pass;
            }
            println!(
                "{}/{} checks passed",
                outcomes.iter().filter(|o| o.pass).count(),
                outcomes.len()
            );
            Ok(if all_pass { 0 } else { 1 })
        }
    }
}

fn even_cyclic_command(
    n: u64,
    max_card: Option<u64>,
    m_policy: Option<u64>,
    max_k: u64,
) -> Result<u8, CliError> {
    let max_card = max_card.unwrap_or(8 * n);
    let report = cyclic_even::verify_no_penultimate(n, max_card)
        .map_err(|e| CliError::usage(e.to_string()))?;
    let mut ok = report.holds();
    println!(
        "penultimate scan: {} sequences with cardinality <= {max_card}, {} counterexamples",
        report.checked,
        report.counterexamples.len()
    );
    for (b, lengths) in &report.counterexamples {
        println!("  counterexample {b} with lengths {lengths:?}");
    }

    match cyclic_even::build_three_atom_witness(n) {
        Ok(w) => {
            println!(
                "three-atom witness (n+1 = {} * {}): {}",
                w.factor_a,
                w.factor_b,
                w.triple
                    .iter()
                    .map(|a| format!("({})", a.render()))
                    .collect::<Vec<_>>()
                    .join("")
            );
            let shifter = cyclic_even::build_tail_interval_shifter(n, m_policy)
                .map_err(|e| CliError::failure(e.to_string()))?;
            println!(
                "tail shifter: exponent {} = M {} + max distance {} ({})",
                shifter.exponent, shifter.bound_m, shifter.max_delta, shifter.policy
            );
            let spec = GroupSpec::from_orders(&[n]).unwrap();
            let g = spec.element(vec![1]).unwrap();
            let sample = Sequence::power_of(spec.clone(), g.clone(), n)
                .product(&Sequence::power_of(spec.clone(), spec.neg(&g), n));
            let outcomes = cyclic_even::verify_tail_shifter(&shifter, &[sample])
                .map_err(|e| CliError::failure(e.to_string()))?;
            for o in &outcomes {
                println!(
                    "tail check on {}: lengths [{}, {}], window interval {}, elasticity {} -> {}",
                    o.sample,
                    o.min,
                    o.max,
                    o.window_interval,
                    o.elasticity,
                    if o.pass { "pass" } else { "FAIL" }
                );
                ok &= o.pass;
            }
        }
        Err(cyclic_even::CyclicEvenError::NPlusOnePrime) => {
            println!("n + 1 = {} is prime; running the open-problem search", n + 1);
            let out = cyclic_even::open_problem_search(n, max_k)
                .map_err(|e| CliError::usage(e.to_string()))?;
            match &out.witness {
                None => println!(
                    "no sequence with min L + 1 attainable among {} candidates (k <= {max_k})",
                    out.scanned
                ),
                Some((a, lengths)) => {
                    println!("witness found: {a} with lengths {lengths:?}")
                }
            }
        }
        Err(e) => return Err(CliError::usage(e.to_string())),
    }
    Ok(if ok { 0 } else { 1 })
}
