//! `cosetforge` — scriptable front end for the exact-counting library.
//!
//! Every subcommand reads explicit flags or JSON files, writes JSON (default),
//! CSV, or text to stdout or `--out`, and exits 0 on success, 1 on a
//! precondition violation, 2 when an enumeration cap or search budget is
//! exceeded, and 64 on a usage error. Runs are deterministic: randomized
//! subcommands take their seed from the configuration, big integers are
//! always serialized as decimal strings, and repeated runs with the same
//! flags produce byte-identical output.

use std::collections::BTreeMap;
use std::io::Write as _;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use cosetforge::abelian::{Element, GroupSpec};
use cosetforge::counting::{
    coset_count_bounds, coset_ring_length_bound, count_cosets, count_subgroups, distortion_floor,
    evertse_bound, lambda_constant, representable, BoundValue, DistortionMode, GroupClassSpec,
};
use cosetforge::cosetring::{
    extract_coset, minimal_representation_length, SignedCosetCombination,
};
use cosetforge::partition::Partition;
use cosetforge::qbinom::ExactCount;
use cosetforge::spectral::{
    a_norm, default_witnesses, distortion_witness, idempotent_survey, CoefficientVector,
    InjectionTable,
};
use cosetforge::sunit::{count_vs_evertse, power_sums_with_stats, zero_sums_with_stats, PrimeSet};
use cosetforge::verify::{self, CheckReport, VerifyConfig};
use cosetforge::Limits;

const EXIT_PRECONDITION: u8 = 1;
const EXIT_RESOURCE: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(
    name = "cosetforge",
    about = "Exact subgroup/coset counting in finite abelian p-groups, signed coset-combination algebra, Fourier algebra norms, and S-unit enumeration",
    version,
    disable_help_subcommand = true
)]
struct Cli {
    #[command(flatten)]
    run: RunFlags,
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every subcommand; together with the inputs they pin the
/// output bytes.
#[derive(Args, Serialize, Clone)]
struct RunFlags {
    /// Seed for all randomized work.
    #[arg(long, global = true, default_value_t = verify::DEFAULT_SEED)]
    seed: u64,
    /// Enumeration cap on group orders (COSETFORGE_CAP overrides the default).
    #[arg(long, global = true)]
    cap: Option<u64>,
    /// Candidate budget for S-unit searches.
    #[arg(long, global = true)]
    budget: Option<u64>,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    output: OutputFormat,
    /// Write output to this path instead of stdout.
    #[arg(long, global = true)]
    out: Option<std::path::PathBuf>,
    /// Worker threads for the verification grids.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum OutputFormat {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Exact number of subgroups of order p^r in the group of the given type.
    Count {
        #[arg(long)]
        p: u64,
        /// Type partition, comma-separated, e.g. 2,1.
        #[arg(long = "type", value_parser = parse_partition, default_value = "")]
        group_type: Partition,
        #[arg(long)]
        r: u32,
    },
    /// Exact number of cosets of cardinality p^r.
    Cosets {
        #[arg(long)]
        p: u64,
        #[arg(long = "type", value_parser = parse_partition, default_value = "")]
        group_type: Partition,
        #[arg(long)]
        r: u32,
    },
    /// Coset-count sandwich for the rectangular group (Z_{p^a})^N.
    Bounds {
        #[arg(long)]
        p: u64,
        #[arg(long = "N")]
        n: u32,
        #[arg(long)]
        a: u32,
        #[arg(long)]
        r: u32,
        /// Linear slack coefficient standing in for the O(N) term.
        #[arg(long, default_value_t = 2.0)]
        slack: f64,
    },
    /// The extraction loss exponent Λ(L,p) = L + log_p L.
    Lambda {
        #[arg(long = "L")]
        l: u64,
        #[arg(long)]
        p: u64,
    },
    /// Double-exponential coset-ring length bound exp(exp(D·C⁴)).
    GsBound {
        #[arg(long)]
        c_norm: f64,
        #[arg(long = "D")]
        d: f64,
    },
    /// S-unit solution-count bound C₁·exp(C₂·n³·log n).
    EvertseBound {
        #[arg(long)]
        n: u32,
        #[arg(long = "C1", default_value_t = 1.0)]
        c1: f64,
        #[arg(long = "C2", default_value_t = 1.0)]
        c2: f64,
    },
    /// Distortion growth floor c·(log log n)^{1/4} or c·(log log log n)^{1/4}.
    Phi {
        #[arg(long)]
        n: u64,
        #[arg(long, value_enum)]
        mode: PhiMode,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
    },
    /// Representability of one character-system class inside another.
    Represent {
        /// Prime-power factors, e.g. 2^2 or 2^3,3^5.
        #[arg(long, value_parser = parse_class_spec)]
        source: GroupClassSpec,
        #[arg(long, value_parser = parse_class_spec)]
        target: GroupClassSpec,
    },
    /// Extract a guaranteed-large coset from a signed indicator combination.
    Extract {
        /// JSON file: {"group":…, "positives":[…], "negatives":[…]}.
        #[arg(long, value_name = "FILE")]
        input: std::path::PathBuf,
    },
    /// Minimal number of signed cosets representing a set.
    Minrep {
        /// JSON file: {"group":…, "elements":[[…],…]}.
        #[arg(long, value_name = "FILE")]
        input: std::path::PathBuf,
        #[arg(long, default_value_t = 4)]
        max_l: u32,
    },
    /// Algebra norm of a 0/1 subset of the dual group.
    Norm {
        /// Group JSON, e.g. `{"p":2,"type":[2]}`.
        #[arg(long, value_parser = parse_group)]
        group: GroupSpec,
        /// Dual indices (positions in the ascending element order).
        #[arg(long, value_delimiter = ',')]
        subset: Vec<usize>,
    },
    /// Exhaustive norm/representation survey over dual subsets.
    Survey {
        #[arg(long, value_parser = parse_group)]
        group: Option<GroupSpec>,
        /// Sweep all group types of every prime up to this order instead.
        #[arg(long)]
        max_order: Option<u64>,
        #[arg(long, default_value_t = f64::INFINITY)]
        norm_cap: f64,
        #[arg(long, default_value_t = 3)]
        max_l: u32,
    },
    /// Distortion lower bound of a character injection on a witness family.
    Witness {
        /// InjectionTable JSON file.
        #[arg(long, value_name = "FILE")]
        sigma: std::path::PathBuf,
        /// Witness family JSON file (default: all coset indicators of the source).
        #[arg(long, value_name = "FILE")]
        witnesses: Option<std::path::PathBuf>,
    },
    /// Bounded-height S-unit equation solutions.
    Sunit {
        #[command(subcommand)]
        which: SunitCommand,
    },
    /// Run the formula-vs-oracle verification grid and print a ledger.
    Verify {
        /// Largest group order in the count grids.
        #[arg(long, default_value_t = 1 << 10)]
        grid_cap: u64,
        #[arg(long, default_value_t = 500)]
        samples: usize,
    },
}

#[derive(Copy, Clone, ValueEnum)]
enum PhiMode {
    PGroup,
    NoPSubgroup,
}

#[derive(Subcommand)]
enum SunitCommand {
    /// Solutions of x₁ + … + x_l = 0.
    Zero {
        #[arg(long, value_delimiter = ',')]
        primes: Vec<u64>,
        #[arg(long)]
        l: usize,
        #[arg(long)]
        exp_bound: u32,
    },
    /// Solutions of x₁ + … + x_l = p^R with p outside the prime set.
    Power {
        #[arg(long, value_delimiter = ',')]
        primes: Vec<u64>,
        #[arg(long)]
        p: u64,
        #[arg(long = "R")]
        r: u32,
        #[arg(long)]
        l: usize,
        #[arg(long)]
        exp_bound: u32,
    },
    /// Observed solution count beside the symbolic solution-count bound.
    Compare {
        #[arg(long, value_delimiter = ',')]
        primes: Vec<u64>,
        #[arg(long)]
        l: usize,
        #[arg(long)]
        exp_bound: u32,
        #[arg(long = "C1", default_value_t = 1.0)]
        c1: f64,
        #[arg(long = "C2", default_value_t = 1.0)]
        c2: f64,
    },
}

fn parse_partition(s: &str) -> Result<Partition, String> {
    if s.trim().is_empty() {
        return Ok(Partition::zero());
    }
    let parts: Vec<u32> = s
        .split(',')
        .map(|t| t.trim().parse::<u32>().map_err(|e| format!("bad part {t:?}: {e}")))
        .collect::<Result<_, _>>()?;
    Partition::new(parts).map_err(|e| e.to_string())
}

fn parse_group(s: &str) -> Result<GroupSpec, String> {
    serde_json::from_str(s).map_err(|e| format!("bad group JSON: {e}"))
}

/// `2^3,3^5` → factors [(2,3),(3,5)]; a bare prime means exponent 1.
fn parse_class_spec(s: &str) -> Result<GroupClassSpec, String> {
    let mut factors = Vec::new();
    for item in s.split(',') {
        let item = item.trim();
        let (base, exp) = match item.split_once('^') {
            Some((b, e)) => (
                b.parse::<u64>().map_err(|e| format!("bad prime {b:?}: {e}"))?,
                e.parse::<u32>().map_err(|err| format!("bad exponent {e:?}: {err}"))?,
            ),
            None => (item.parse::<u64>().map_err(|e| format!("bad prime {item:?}: {e}"))?, 1),
        };
        factors.push((base, exp));
    }
    GroupClassSpec::new(factors).map_err(|e| e.to_string())
}

fn limits_from(flags: &RunFlags) -> Limits {
    let mut limits = Limits::default();
    if let Ok(value) = std::env::var("COSETFORGE_CAP") {
        if let Ok(cap) = value.parse::<u64>() {
            limits.enumeration_cap = cap;
        }
    }
    if let Some(cap) = flags.cap {
        limits.enumeration_cap = cap;
    }
    if let Some(budget) = flags.budget {
        limits.sunit_budget = budget;
    }
    limits
}

struct Emitter {
    format: OutputFormat,
    out: Option<std::path::PathBuf>,
}

impl Emitter {
    fn write(&self, text: &str) -> std::io::Result<()> {
        match &self.out {
            Some(path) => std::fs::write(path, text),
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout.write_all(text.as_bytes())
            }
        }
    }

    /// Structured payload: JSON by default, `text` as given for --output text.
    fn emit<T: Serialize>(&self, value: &T, text: impl FnOnce() -> String) -> std::io::Result<()> {
        match self.format {
            OutputFormat::Json => {
                let mut body = serde_json::to_string_pretty(value).expect("serializable");
                body.push('\n');
                self.write(&body)
            }
            _ => {
                let mut body = text();
                if !body.ends_with('\n') {
                    body.push('\n');
                }
                self.write(&body)
            }
        }
    }

    /// Bare scalar: printed without quoting in every format.
    fn emit_scalar(&self, value: impl std::fmt::Display) -> std::io::Result<()> {
        self.write(&format!("{value}\n"))
    }
}

#[derive(Serialize)]
struct BoundsOutput {
    exact: ExactCount,
    upper: BoundValue,
    lower: BoundValue,
    constants: BTreeMap<String, f64>,
    exact_within_bounds: bool,
}

#[derive(serde::Deserialize)]
struct MinrepInput {
    group: GroupSpec,
    elements: Vec<Element>,
}

fn run(cli: Cli) -> Result<(), (u8, String)> {
    let limits = limits_from(&cli.run);
    let emitter = Emitter { format: cli.run.output, out: cli.run.out.clone() };
    let fail = |e: cosetforge::Error| {
        (if e.is_resource_limit() { EXIT_RESOURCE } else { EXIT_PRECONDITION }, e.to_string())
    };
    let io_fail = |e: std::io::Error| (EXIT_PRECONDITION, e.to_string());

    match cli.command {
        Command::Count { p, group_type, r } => {
            let count = count_subgroups(p, &group_type, r).map_err(fail)?;
            emitter.emit_scalar(count).map_err(io_fail)
        }
        Command::Cosets { p, group_type, r } => {
            let count = count_cosets(p, &group_type, r).map_err(fail)?;
            emitter.emit_scalar(count).map_err(io_fail)
        }
        Command::Bounds { p, n, a, r, slack } => {
            let exact = count_cosets(p, &Partition::rectangular(a, n as usize), r).map_err(fail)?;
            let (upper, lower) = coset_count_bounds(p, n, a, r, slack).map_err(fail)?;
            let within = upper.admits(&exact) && lower.admits(&exact);
            let mut constants = BTreeMap::new();
            constants.insert("slack_coeff".to_string(), slack);
            let output = BoundsOutput { exact, upper, lower, constants, exact_within_bounds: within };
            emitter
                .emit(&output, || {
                    format!(
                        "exact={} within_bounds={}",
                        output.exact, output.exact_within_bounds
                    )
                })
                .map_err(io_fail)
        }
        Command::Lambda { l, p } => {
            let lambda = lambda_constant(l, p).map_err(fail)?;
            emitter.emit_scalar(lambda.real).map_err(io_fail)
        }
        Command::GsBound { c_norm, d } => {
            let bound = coset_ring_length_bound(c_norm, d).map_err(fail)?;
            emitter.emit(&bound, || format!("{:?}", bound.value)).map_err(io_fail)
        }
        Command::EvertseBound { n, c1, c2 } => {
            let bound = evertse_bound(n, c1, c2).map_err(fail)?;
            emitter.emit(&bound, || format!("{:?}", bound.value)).map_err(io_fail)
        }
        Command::Phi { n, mode, c } => {
            let mode = match mode {
                PhiMode::PGroup => DistortionMode::PGroup,
                PhiMode::NoPSubgroup => DistortionMode::NoPSubgroup,
            };
            let bound = distortion_floor(n, mode, c).map_err(fail)?;
            match bound.value {
                cosetforge::counting::BoundExpr::Real(x) => {
                    emitter.emit_scalar(x).map_err(io_fail)
                }
                other => emitter.emit(&other, || format!("{other:?}")).map_err(io_fail),
            }
        }
        Command::Represent { source, target } => {
            emitter.emit_scalar(representable(&source, &target)).map_err(io_fail)
        }
        Command::Extract { input } => {
            let text = std::fs::read_to_string(&input).map_err(io_fail)?;
            let comb: SignedCosetCombination =
                serde_json::from_str(&text).map_err(|e| (EXIT_PRECONDITION, e.to_string()))?;
            let outcome = extract_coset(&comb, &limits).map_err(fail)?;
            emitter
                .emit(&outcome, || {
                    format!(
                        "K={} L={} lambda={} size=2^{}",
                        outcome.ledger.k,
                        outcome.ledger.l,
                        outcome.ledger.lambda,
                        outcome.ledger.size_exp
                    )
                })
                .map_err(io_fail)
        }
        Command::Minrep { input, max_l } => {
            let text = std::fs::read_to_string(&input).map_err(io_fail)?;
            let parsed: MinrepInput =
                serde_json::from_str(&text).map_err(|e| (EXIT_PRECONDITION, e.to_string()))?;
            let length =
                minimal_representation_length(&parsed.group, &parsed.elements, max_l, &limits)
                    .map_err(fail)?;
            match length {
                Some(len) => emitter.emit_scalar(len).map_err(io_fail),
                None => emitter.emit_scalar("null").map_err(io_fail),
            }
        }
        Command::Norm { group, subset } => {
            let elements = group.elements();
            let mut support = Vec::with_capacity(subset.len());
            for idx in subset {
                let Some(e) = elements.get(idx) else {
                    return Err((
                        EXIT_PRECONDITION,
                        format!("dual index {idx} out of range (order {})", elements.len()),
                    ));
                };
                support.push(e.clone());
            }
            let v = CoefficientVector::indicator(group, support).map_err(fail)?;
            let norm = a_norm(&v, &limits).map_err(fail)?;
            emitter.emit_scalar(norm).map_err(io_fail)
        }
        Command::Survey { group, max_order, norm_cap, max_l } => {
            let groups: Vec<GroupSpec> = match (group, max_order) {
                (Some(g), None) => vec![g],
                (None, Some(cap)) => {
                    let mut out = Vec::new();
                    for p in (2..=cap).filter(|&p| cosetforge::qbinom::is_prime(p)) {
                        for ty in verify::group_types(p, cap) {
                            out.push(GroupSpec::new(p, ty).map_err(fail)?);
                        }
                    }
                    out
                }
                _ => {
                    return Err((
                        EXIT_USAGE,
                        "survey needs exactly one of --group or --max-order".to_string(),
                    ))
                }
            };
            let mut csv = String::from(
                "group,subset_bitmask,norm,is_coset,min_coset_length,distinct_subgroups\n",
            );
            let mut rows_json = Vec::new();
            for g in groups {
                let rows = idempotent_survey(&g, norm_cap, max_l, &limits).map_err(fail)?;
                let label = format!(
                    "p{}:{}",
                    g.p(),
                    g.group_type().parts().iter().map(|x| x.to_string()).collect::<Vec<_>>().join("-")
                );
                for row in rows {
                    csv.push_str(&format!(
                        "{label},{},{:.12},{},{},{}\n",
                        row.subset_bitmask,
                        row.norm,
                        row.is_coset,
                        row.min_coset_length.map_or("none".to_string(), |v| v.to_string()),
                        row.distinct_subgroups.map_or("none".to_string(), |v| v.to_string()),
                    ));
                    rows_json.push((label.clone(), row));
                }
            }
            match cli.run.output {
                OutputFormat::Json => emitter.emit(&rows_json, String::new).map_err(io_fail),
                _ => emitter.write(&csv).map_err(io_fail),
            }
        }
        Command::Witness { sigma, witnesses } => {
            let text = std::fs::read_to_string(&sigma).map_err(io_fail)?;
            let table: InjectionTable =
                serde_json::from_str(&text).map_err(|e| (EXIT_PRECONDITION, e.to_string()))?;
            let family: Vec<CoefficientVector> = match witnesses {
                Some(path) => {
                    let text = std::fs::read_to_string(&path).map_err(io_fail)?;
                    serde_json::from_str(&text).map_err(|e| (EXIT_PRECONDITION, e.to_string()))?
                }
                None => default_witnesses(table.source(), &limits).map_err(fail)?,
            };
            let report = distortion_witness(&table, &family, &limits).map_err(fail)?;
            emitter
                .emit(&report, || format!("distortion ≥ {:.12}", report.distortion_lower_bound))
                .map_err(io_fail)
        }
        Command::Sunit { which } => {
            #[derive(Serialize)]
            struct SunitOutput {
                parameters: BTreeMap<String, serde_json::Value>,
                count: usize,
                budget_used: u64,
                solutions: Vec<Vec<i64>>,
            }
            let (params, solutions, stats) = match which {
                SunitCommand::Zero { primes, l, exp_bound } => {
                    let m = PrimeSet::new(primes.clone()).map_err(fail)?;
                    let (sols, stats) =
                        zero_sums_with_stats(&m, l, exp_bound, &limits).map_err(fail)?;
                    let mut params = BTreeMap::new();
                    params.insert("equation".into(), serde_json::json!("zero-sum"));
                    params.insert("primes".into(), serde_json::json!(m.primes()));
                    params.insert("l".into(), serde_json::json!(l));
                    params.insert("exp_bound".into(), serde_json::json!(exp_bound));
                    (params, sols, stats)
                }
                SunitCommand::Power { primes, p, r, l, exp_bound } => {
                    let m = PrimeSet::new(primes.clone()).map_err(fail)?;
                    let (sols, stats) =
                        power_sums_with_stats(&m, l, p, r, exp_bound, &limits).map_err(fail)?;
                    let mut params = BTreeMap::new();
                    params.insert("equation".into(), serde_json::json!("power-sum"));
                    params.insert("primes".into(), serde_json::json!(m.primes()));
                    params.insert("p".into(), serde_json::json!(p));
                    params.insert("R".into(), serde_json::json!(r));
                    params.insert("l".into(), serde_json::json!(l));
                    params.insert("exp_bound".into(), serde_json::json!(exp_bound));
                    (params, sols, stats)
                }
                SunitCommand::Compare { primes, l, exp_bound, c1, c2 } => {
                    let m = PrimeSet::new(primes).map_err(fail)?;
                    let report = count_vs_evertse(&m, l, exp_bound, c1, c2, &limits).map_err(fail)?;
                    return emitter
                        .emit(&report, || {
                            format!("observed={} (bound is symbolic)", report.observed)
                        })
                        .map_err(io_fail);
                }
            };
            let output = SunitOutput {
                parameters: params,
                count: solutions.len(),
                budget_used: stats.budget_used,
                solutions,
            };
            emitter
                .emit(&output, || format!("{} solutions", output.count))
                .map_err(io_fail)
        }
        Command::Verify { grid_cap, samples } => {
            let cfg = VerifyConfig {
                seed: cli.run.seed,
                grid_cap,
                extraction_samples: samples,
                limits: limits.clone(),
                ..VerifyConfig::default()
            };
            let reports = run_verify(&cfg, cli.run.threads).map_err(fail)?;
            let all_passed = reports.iter().all(|r| r.passed);
            let text = || {
                let mut lines = String::new();
                for r in &reports {
                    lines.push_str(&format!(
                        "[{}] {}: {}\n",
                        if r.passed { "PASS" } else { "FAIL" },
                        r.name,
                        r.details
                    ));
                }
                lines.push_str(&format!(
                    "{}/{} checks passed\n",
                    reports.iter().filter(|r| r.passed).count(),
                    reports.len()
                ));
                lines
            };
            match cli.run.output {
                OutputFormat::Json => emitter.emit(&reports, String::new).map_err(io_fail)?,
                _ => emitter.write(&text()).map_err(io_fail)?,
            }
            if all_passed {
                Ok(())
            } else {
                Err((EXIT_PRECONDITION, "verification ledger has failures".to_string()))
            }
        }
    }
}

/// Runs the verification checks, fanning independent checks across the
/// requested number of threads; the ledger order is fixed regardless.
fn run_verify(cfg: &VerifyConfig, threads: usize) -> cosetforge::Result<Vec<CheckReport>> {
    type Check = fn(&VerifyConfig) -> cosetforge::Result<CheckReport>;
    let checks: Vec<Check> = vec![
        verify::check_gaussian_subspace,
        verify::check_subgroup_count_grid,
        verify::check_coset_count_grid,
        verify::check_bound_sandwich,
        verify::check_type_containment,
        verify::check_extraction,
        verify::check_norm_facts,
        verify::check_sunit_oracle,
        verify::check_representable,
        verify::report_free_rank_boundary,
    ];
    if threads <= 1 {
        checks.into_iter().map(|f| f(cfg)).collect()
    } else {
        use rayon::prelude::*;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| cosetforge::Error::Precondition(e.to_string()))?;
        pool.install(|| checks.par_iter().map(|f| f(cfg)).collect())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // clap handles --help/--version as "errors" with success status.
            if err.use_stderr() {
                eprint!("{err}");
                return ExitCode::from(EXIT_USAGE);
            }
            print!("{err}");
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err((code, message)) => {
            eprintln!("error: {message}");
            ExitCode::from(code)
        }
    }
}
