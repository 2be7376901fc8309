//! Formula-vs-oracle verification grids.
//!
//! Every closed-form count and bound in the crate is checked here against
//! exhaustive enumeration at desk scale. The checks return structured
//! reports so the CLI can print a pass/fail ledger and the acceptance suite
//! can assert them; all detail strings are built from sorted data, so a
//! fixed configuration always produces byte-identical reports.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::abelian::{
    coset_order_census, for_each_subgroup_type, free_rank_order_bound, subgroup_order_census,
    GroupSpec, Subgroup,
};
use crate::cosetring::{extract_coset, is_coset_set, sample_indicator_combination};
use crate::counting::{
    count_cosets, count_subgroups, representable, subgroup_count_lower_bound,
    subgroup_count_upper_bound, BoundExpr, GroupClassSpec,
};
use crate::partition::{partitions_of, Partition};
use crate::qbinom::{gaussian_binomial, is_prime, prime_power};
use crate::spectral::{a_norm, default_witnesses, subset_norms};
use crate::sunit::{enumerate_power_sums, enumerate_zero_sums, gcd_of};
use crate::{Limits, Result};

/// Fixed default seed for every randomized check.
pub const DEFAULT_SEED: u64 = 271828;

/// Outcome of one verification check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub passed: bool,
    pub details: String,
}

impl CheckReport {
    fn new(name: &str, passed: bool, details: String) -> CheckReport {
        CheckReport { name: name.to_string(), passed, details }
    }
}

/// Scale and seed knobs for the verification grids.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Largest group order in the count grids.
    pub grid_cap: u64,
    /// Largest group order for the exhaustive coset-norm check.
    pub norm_cap_order: u64,
    /// Largest group order for the "norm 1 iff coset" sweep.
    pub iff_cap_order: u64,
    pub extraction_samples: usize,
    /// Inclusive range of elementary-abelian ranks the extractions sample.
    pub extraction_dims: (u32, u32),
    pub sunit_exp_bound_max: u32,
    pub limits: Limits,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            seed: DEFAULT_SEED,
            grid_cap: 1 << 10,
            norm_cap_order: 32,
            iff_cap_order: 16,
            extraction_samples: 500,
            extraction_dims: (4, 10),
            sunit_exp_bound_max: 4,
            limits: Limits::default(),
        }
    }
}

/// All group types with `p^{‖α‖} ≤ cap`, by ascending weight then
/// descending-lexicographic partition order.
pub fn group_types(p: u64, cap: u64) -> Vec<Partition> {
    let mut out = Vec::new();
    let mut weight = 0u32;
    let mut order = 1u64;
    loop {
        out.extend(partitions_of(weight));
        weight += 1;
        order = match order.checked_mul(p) {
            Some(next) if next <= cap => next,
            _ => break,
        };
    }
    out
}

fn primes_up_to(n: u64) -> Vec<u64> {
    (2..=n).filter(|&p| is_prime(p)).collect()
}

/// Exact subgroup counts versus exhaustive enumeration, all types with
/// `p^{‖α‖} ≤ grid_cap`, `p ∈ {2,3}`, every order. Zero tolerance.
pub fn check_subgroup_count_grid(cfg: &VerifyConfig) -> Result<CheckReport> {
    let mut types_checked = 0usize;
    let mut counts_checked = 0usize;
    let mut failures = Vec::new();
    for p in [2u64, 3] {
        for alpha in group_types(p, cfg.grid_cap) {
            let group = GroupSpec::new(p, alpha.clone())?;
            let census = subgroup_order_census(&group, &cfg.limits)?;
            for (r, &observed) in census.iter().enumerate() {
                let formula = count_subgroups(p, &alpha, r as u32)?;
                counts_checked += 1;
                if formula.to_u128() != Some(observed) {
                    failures.push(format!("p={p} alpha={alpha} r={r}: {formula} vs {observed}"));
                }
            }
            types_checked += 1;
        }
    }
    Ok(CheckReport::new(
        "subgroup-count-grid",
        failures.is_empty(),
        if failures.is_empty() {
            format!("{types_checked} types, {counts_checked} exact counts match enumeration")
        } else {
            failures.join("; ")
        },
    ))
}

/// Exact coset counts versus the coset-representative walk on the same grid.
pub fn check_coset_count_grid(cfg: &VerifyConfig) -> Result<CheckReport> {
    let mut counts_checked = 0usize;
    let mut failures = Vec::new();
    for p in [2u64, 3] {
        for alpha in group_types(p, cfg.grid_cap) {
            let group = GroupSpec::new(p, alpha.clone())?;
            let census = coset_order_census(&group, &cfg.limits)?;
            for (r, &observed) in census.iter().enumerate() {
                let formula = count_cosets(p, &alpha, r as u32)?;
                counts_checked += 1;
                if formula.to_u128() != Some(observed) {
                    failures.push(format!("p={p} alpha={alpha} r={r}: {formula} vs {observed}"));
                }
            }
        }
    }
    Ok(CheckReport::new(
        "coset-count-grid",
        failures.is_empty(),
        if failures.is_empty() {
            format!("{counts_checked} exact coset counts match the representative walk")
        } else {
            failures.join("; ")
        },
    ))
}

/// Gaussian binomials versus brute-force subspace counts: the subspaces of
/// `F_p^n` are the subgroups of the elementary abelian group of rank `n`.
pub fn check_gaussian_subspace(cfg: &VerifyConfig) -> Result<CheckReport> {
    let mut failures = Vec::new();
    let mut checked = 0usize;
    for p in [2u64, 3] {
        for n in 0..=4u32 {
            let group = GroupSpec::new(p, Partition::rectangular(1, n as usize))?;
            let census = subgroup_order_census(&group, &cfg.limits)?;
            for m in 0..=n {
                let formula = gaussian_binomial(n as i64, m as i64, p)?;
                checked += 1;
                if formula.to_u128() != Some(census[m as usize]) {
                    failures.push(format!(
                        "({n},{m})_{p} = {formula} but {} subspaces",
                        census[m as usize]
                    ));
                }
            }
        }
    }
    Ok(CheckReport::new(
        "gaussian-subspace",
        failures.is_empty(),
        if failures.is_empty() {
            format!("{checked} Gaussian binomials equal subspace counts")
        } else {
            failures.join("; ")
        },
    ))
}

/// The pre-asymptotic sandwich: exact counts respect the rectangular upper
/// bound and, for bounded types `γ` of full weight, the lower bound with
/// `b1 = r`. Comparisons are exact (cross-powered rational exponents).
pub fn check_bound_sandwich(_cfg: &VerifyConfig) -> Result<CheckReport> {
    let mut upper_checked = 0usize;
    let mut lower_checked = 0usize;
    let mut failures = Vec::new();
    for p in [2u64, 3] {
        for n in 1..=4u32 {
            for a in [2u32, 3] {
                let weight = n * a;
                let rect = Partition::rectangular(a, n as usize);
                for r in 0..=weight {
                    let exact = count_subgroups(p, &rect, r)?;
                    let bound = subgroup_count_upper_bound(p, n, a, r)?;
                    let BoundExpr::Exact(bound_value) = &bound.value else { unreachable!() };
                    upper_checked += 1;
                    if exact > *bound_value {
                        failures.push(format!(
                            "upper p={p} N={n} a={a} r={r}: {exact} > {bound_value}"
                        ));
                    }
                }
                // Admissible γ: parts ≤ a−1, ‖γ‖ = N·a.
                for gamma in partitions_of(weight)
                    .into_iter()
                    .filter(|g| g.part(0) <= a - 1)
                {
                    for r in 0..=weight {
                        let exact = count_subgroups(p, &gamma, r)?;
                        let bound = subgroup_count_lower_bound(p, n, a, r, r.max(1))?;
                        let form = bound.power_form.expect("lower bound carries its exponent");
                        lower_checked += 1;
                        if !form.le(&exact) {
                            failures.push(format!(
                                "lower p={p} N={n} a={a} r={r} gamma={gamma}: {exact} < p^({}/{})",
                                form.num, form.den
                            ));
                        }
                    }
                }
            }
        }
    }
    Ok(CheckReport::new(
        "bound-sandwich",
        failures.is_empty(),
        if failures.is_empty() {
            format!("{upper_checked} upper and {lower_checked} lower bounds hold exactly")
        } else {
            failures.join("; ")
        },
    ))
}

/// Seeded random extractions: the extracted set is a coset inside `U` of at
/// least the guaranteed size, across elementary abelian ranks.
pub fn check_extraction(cfg: &VerifyConfig) -> Result<CheckReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (lo, hi) = cfg.extraction_dims;
    let dims: Vec<u32> = (lo..=hi).collect();
    let mut failures = Vec::new();
    let mut done = 0usize;
    while done < cfg.extraction_samples {
        let n = dims[done % dims.len()];
        let group = GroupSpec::new(2, Partition::rectangular(1, n as usize))?;
        let comb = sample_indicator_combination(&group, &mut rng, 4, &cfg.limits)?;
        match extract_coset(&comb, &cfg.limits) {
            Ok(out) => {
                let u: std::collections::BTreeSet<_> =
                    comb.materialize(&cfg.limits)?.into_iter().collect();
                let members = out.coset.elements();
                if !members.iter().all(|x| u.contains(x)) {
                    failures.push(format!("sample {done} (N={n}): coset not inside U"));
                } else if (out.ledger.size_exp as i64) < out.ledger.guarantee_exp {
                    failures.push(format!(
                        "sample {done} (N={n}): size 2^{} below guarantee 2^{}",
                        out.ledger.size_exp, out.ledger.guarantee_exp
                    ));
                } else if !is_coset_set(&group, &members) {
                    failures.push(format!("sample {done} (N={n}): extracted set not a coset"));
                }
            }
            Err(e) => failures.push(format!("sample {done} (N={n}): {e}")),
        }
        done += 1;
    }
    Ok(CheckReport::new(
        "coset-extraction",
        failures.is_empty(),
        if failures.is_empty() {
            format!(
                "{} seeded extractions (ranks {lo}..={hi}) met the p^(K-ceil(Lambda)) guarantee",
                cfg.extraction_samples
            )
        } else {
            failures.join("; ")
        },
    ))
}

/// Subgroup types are contained in the ambient type, for every subgroup of
/// every group on the grid (containment checked on conjugates, which is
/// equivalent).
pub fn check_type_containment(cfg: &VerifyConfig) -> Result<CheckReport> {
    let mut subgroups_checked = 0u128;
    let mut failures = Vec::new();
    for p in [2u64, 3] {
        for alpha in group_types(p, cfg.grid_cap) {
            let group = GroupSpec::new(p, alpha.clone())?;
            let alpha_star = alpha.conjugate();
            let mut bad = 0u64;
            for_each_subgroup_type(&group, &cfg.limits, |_, beta_star| {
                subgroups_checked += 1;
                for (k, &b) in beta_star.iter().enumerate() {
                    if b > alpha_star.part(k) {
                        bad += 1;
                        break;
                    }
                }
            })?;
            if bad > 0 {
                failures.push(format!("p={p} alpha={alpha}: {bad} subgroups violate containment"));
            }
        }
    }
    Ok(CheckReport::new(
        "type-containment",
        failures.is_empty(),
        if failures.is_empty() {
            format!("{subgroups_checked} subgroup types contained in their ambient type")
        } else {
            failures.join("; ")
        },
    ))
}

/// Norm facts: every coset indicator has norm 1 (order ≤ norm_cap_order,
/// tolerance 1e-12); the two-character set in the dual of Z_4 has norm
/// (2+2√2)/4 (1e-9); and on groups of order ≤ iff_cap_order a nonempty 0/1
/// set has norm 1 iff it is a coset (1e-9).
pub fn check_norm_facts(cfg: &VerifyConfig) -> Result<CheckReport> {
    let mut failures = Vec::new();
    let mut coset_norms = 0usize;
    for p in primes_up_to(cfg.norm_cap_order) {
        for alpha in group_types(p, cfg.norm_cap_order) {
            let group = GroupSpec::new(p, alpha.clone())?;
            for w in default_witnesses(&group, &cfg.limits)? {
                let norm = a_norm(&w, &cfg.limits)?;
                coset_norms += 1;
                if (norm - 1.0).abs() > 1e-12 {
                    failures.push(format!(
                        "p={p} alpha={alpha}: coset indicator norm {norm:.15}"
                    ));
                }
            }
        }
    }

    let z4 = GroupSpec::new(2, Partition::new(vec![2])?)?;
    let pair = crate::spectral::CoefficientVector::indicator(
        z4,
        [crate::abelian::Element(vec![0]), crate::abelian::Element(vec![1])],
    )?;
    let got = a_norm(&pair, &cfg.limits)?;
    let expect = (2.0 + 2.0 * 2.0f64.sqrt()) / 4.0;
    if (got - expect).abs() > 1e-9 {
        failures.push(format!("norm of {{0,1}} in dual Z_4: {got:.12} vs {expect:.12}"));
    }

    let mut subsets_checked = 0usize;
    for p in primes_up_to(cfg.iff_cap_order) {
        for alpha in group_types(p, cfg.iff_cap_order) {
            let group = GroupSpec::new(p, alpha.clone())?;
            let order = group.order_u64().expect("small group") as usize;
            let norms = subset_norms(&group);
            let elements = group.elements();
            for mask in 1usize..(1 << order) {
                let support: Vec<_> = (0..order)
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| elements[i].clone())
                    .collect();
                let norm_is_one = (norms[mask] - 1.0).abs() <= 1e-9;
                subsets_checked += 1;
                if norm_is_one != is_coset_set(&group, &support) {
                    failures.push(format!(
                        "p={p} alpha={alpha} mask={mask:#x}: norm {:.12} vs cosetness {}",
                        norms[mask],
                        is_coset_set(&group, &support)
                    ));
                }
            }
        }
    }

    Ok(CheckReport::new(
        "norm-facts",
        failures.is_empty(),
        if failures.is_empty() {
            format!(
                "{coset_norms} coset indicators at norm 1; norm=1 iff coset over {subsets_checked} subsets"
            )
        } else {
            failures.join("; ")
        },
    ))
}

/// Zero-sum enumeration against an independent direct scan, plus the two
/// power-sum identities 4 = 3+1 and 8 = 9−1.
pub fn check_sunit_oracle(cfg: &VerifyConfig) -> Result<CheckReport> {
    let m = crate::sunit::PrimeSet::new(vec![2, 3])?;
    let mut failures = Vec::new();
    for exp_bound in 0..=cfg.sunit_exp_bound_max {
        let fast = enumerate_zero_sums(&m, 3, exp_bound, &cfg.limits)?;
        let naive = naive_zero_sum_triples(&m, exp_bound);
        if fast != naive {
            failures.push(format!(
                "l=3 B={exp_bound}: {} solutions vs naive {}",
                fast.len(),
                naive.len()
            ));
        }
    }
    let m3 = crate::sunit::PrimeSet::new(vec![3])?;
    if !enumerate_power_sums(&m3, 2, 2, 2, 1, &cfg.limits)?.contains(&vec![3, 1]) {
        failures.push("power sum 4 = 3 + 1 missing".into());
    }
    if !enumerate_power_sums(&m3, 2, 2, 3, 2, &cfg.limits)?.contains(&vec![9, -1]) {
        failures.push("power sum 8 = 9 - 1 missing".into());
    }
    Ok(CheckReport::new(
        "sunit-oracle",
        failures.is_empty(),
        if failures.is_empty() {
            format!(
                "zero-sum triples match the naive scan for heights 0..={}; power identities present",
                cfg.sunit_exp_bound_max
            )
        } else {
            failures.join("; ")
        },
    ))
}

/// Literal three-nested-loop reference enumeration of zero-sum triples,
/// kept deliberately independent of the library's search path.
pub fn naive_zero_sum_triples(m: &crate::sunit::PrimeSet, exp_bound: u32) -> Vec<Vec<i64>> {
    let mut magnitudes = vec![1i64];
    for &p in m.primes() {
        let mut next = Vec::new();
        for &v in &magnitudes {
            let mut w = v;
            for _ in 0..=exp_bound {
                next.push(w);
                w *= p as i64;
            }
        }
        magnitudes = next;
    }
    magnitudes.sort_unstable();
    magnitudes.dedup();
    let values: Vec<i64> =
        magnitudes.iter().map(|&v| -v).chain(magnitudes.iter().copied()).collect();
    let mut found = std::collections::BTreeSet::new();
    for &x in &values {
        for &y in &values {
            for &z in &values {
                if x + y + z != 0 {
                    continue;
                }
                if x + y == 0 || y + z == 0 || x + z == 0 {
                    continue;
                }
                if gcd_of(&[x, y, z]) != 1 {
                    continue;
                }
                let mut t = vec![x, y, z];
                t.sort_unstable_by(|a, b| b.cmp(a));
                let mut neg: Vec<i64> = t.iter().map(|&v| -v).collect();
                neg.sort_unstable_by(|a, b| b.cmp(a));
                let pos = |s: &[i64]| s.iter().filter(|&&v| v > 0).count();
                let canon = if (pos(&t), t.clone()) >= (pos(&neg), neg.clone()) { t } else { neg };
                found.insert(canon);
            }
        }
    }
    let mut out: Vec<Vec<i64>> = found.into_iter().collect();
    out.sort_unstable_by(|a, b| b.cmp(a));
    out
}

/// The four fixed representability cases plus seeded reflexivity and
/// transitivity checks.
pub fn check_representable(cfg: &VerifyConfig) -> Result<CheckReport> {
    let spec = |f: &[(u64, u32)]| GroupClassSpec::new(f.to_vec());
    let mut failures = Vec::new();
    if !representable(&spec(&[(2, 2)])?, &spec(&[(2, 3)])?) {
        failures.push("(2^2) into (2^3) should hold".to_string());
    }
    if representable(&spec(&[(2, 2)])?, &spec(&[(2, 1), (3, 5)])?) {
        failures.push("(2^2) into (2^1, 3^5) should fail".to_string());
    }
    let arbitrary = spec(&[(2, 3), (3, 1), (5, 2)])?;
    if !representable(&arbitrary, &arbitrary) {
        failures.push("identity case should hold".to_string());
    }
    if representable(&spec(&[(5, 1)])?, &spec(&[(2, 1), (3, 1)])?) {
        failures.push("(5^1) into (2^1, 3^1) should fail".to_string());
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x9E3779B97F4A7C15);
    let primes = [2u64, 3, 5, 7];
    let random_spec = |rng: &mut ChaCha8Rng| -> Result<GroupClassSpec> {
        let k = rng.gen_range(1..=4usize);
        let factors: Vec<(u64, u32)> = (0..k)
            .map(|_| (primes[rng.gen_range(0..primes.len())], rng.gen_range(1..=4u32)))
            .collect();
        GroupClassSpec::new(factors)
    };
    for i in 0..20 {
        let a = random_spec(&mut rng)?;
        let b = random_spec(&mut rng)?;
        let c = random_spec(&mut rng)?;
        if !representable(&a, &a) {
            failures.push(format!("random case {i}: reflexivity failed"));
        }
        if representable(&a, &b) && representable(&b, &c) && !representable(&a, &c) {
            failures.push(format!("random case {i}: transitivity failed"));
        }
    }
    Ok(CheckReport::new(
        "representable",
        failures.is_empty(),
        if failures.is_empty() {
            "4 fixed cases plus 20 seeded reflexivity/transitivity checks".to_string()
        } else {
            failures.join("; ")
        },
    ))
}

/// Informational: counts the strict-inequality boundary cases of the
/// free-rank order bound on small rectangular grids. Equality at the
/// boundary (e.g. `H = p·G`) makes the strict predicate false; occurrences
/// are reported, never patched.
pub fn report_free_rank_boundary(cfg: &VerifyConfig) -> Result<CheckReport> {
    let mut evaluated = 0u64;
    let mut boundary = 0u64;
    for p in [2u64, 3] {
        for a in [1u32, 2] {
            for n in 1..=3usize {
                let group = GroupSpec::new(p, Partition::rectangular(a, n))?;
                if group.order_u64().is_none_or(|o| o > 256) {
                    continue;
                }
                for r in 0..=group.group_type().weight() {
                    let order = prime_power(p, r)?;
                    for h in crate::abelian::enumerate_subgroups(&group, &order, &cfg.limits)? {
                        for k in 0..=n as u32 {
                            evaluated += 1;
                            if !free_rank_order_bound(&group, &h, k)? {
                                boundary += 1;
                            }
                        }
                    }
                }
            }
        }
    }
    // The predicate is expected to hold away from equality; the boundary
    // count documents where the strict form fails.
    let _ = Subgroup::trivial(&GroupSpec::new(2, Partition::new(vec![1])?)?);
    Ok(CheckReport::new(
        "free-rank-bound-boundary",
        true,
        format!("{evaluated} predicate evaluations, {boundary} strict-inequality boundary cases"),
    ))
}

/// Runs every check in a fixed order.
pub fn run_all(cfg: &VerifyConfig) -> Result<Vec<CheckReport>> {
    Ok(vec![
        check_gaussian_subspace(cfg)?,
        check_subgroup_count_grid(cfg)?,
        check_coset_count_grid(cfg)?,
        check_bound_sandwich(cfg)?,
        check_type_containment(cfg)?,
        check_extraction(cfg)?,
        check_norm_facts(cfg)?,
        check_sunit_oracle(cfg)?,
        check_representable(cfg)?,
        report_free_rank_boundary(cfg)?,
    ])
}
