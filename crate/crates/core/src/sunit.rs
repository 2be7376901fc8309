//! Bounded-height enumeration of S-unit equation solutions.
//!
//! For a finite prime set `M`, an M-unit is a nonzero integer whose prime
//! factors all lie in `M`. Height is measured by a uniform per-prime exponent
//! cap, so the value set at height `B` is `{±∏ pᵢ^{eᵢ} : eᵢ ≤ B}`.
//! `enumerate_zero_sums` finds the tuples summing to zero with gcd 1 and no
//! vanishing proper subsum; `enumerate_power_sums` targets `p^R` for a prime
//! `p ∉ M`. Tuples are canonical up to permutation (sorted descending), and
//! zero-sum tuples additionally up to global negation.
//!
//! Enumeration walks non-increasing tuples directly for short lengths and
//! switches to meet-in-the-middle for `l ≥ 4`: both halves are enumerated as
//! non-increasing tuples and joined on the partial sum under the constraint
//! `min(first half) ≥ max(second half)`, which makes the split of every
//! solution unique.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::counting::{evertse_bound, BoundValue};
use crate::qbinom::is_prime;
use crate::{Error, Limits, Result};

/// A finite set of rational primes, sorted and distinct.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct PrimeSet {
    primes: Vec<u64>,
}

impl PrimeSet {
    pub fn new(mut primes: Vec<u64>) -> Result<Self> {
        primes.sort_unstable();
        primes.dedup();
        for &p in &primes {
            if !is_prime(p) {
                return Err(Error::NotPrime(p));
            }
        }
        Ok(PrimeSet { primes })
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn contains(&self, p: u64) -> bool {
        self.primes.binary_search(&p).is_ok()
    }
}

impl TryFrom<Vec<u64>> for PrimeSet {
    type Error = Error;
    fn try_from(v: Vec<u64>) -> Result<Self> {
        PrimeSet::new(v)
    }
}

impl From<PrimeSet> for Vec<u64> {
    fn from(m: PrimeSet) -> Vec<u64> {
        m.primes
    }
}

/// True iff `|x|` factors entirely over `m` (1 is the empty product).
pub fn is_m_unit(x: i64, m: &PrimeSet) -> Result<bool> {
    if x == 0 {
        return Err(Error::precondition("0 is not an M-unit"));
    }
    let mut v = x.unsigned_abs();
    for &p in m.primes() {
        while v % p == 0 {
            v /= p;
        }
    }
    Ok(v == 1)
}

/// Greatest common divisor of the absolute values.
pub fn gcd_of(entries: &[i64]) -> u64 {
    entries.iter().fold(0u64, |acc, &x| num_integer::gcd(acc, x.unsigned_abs()))
}

/// True iff some nonempty proper sub-collection sums to zero.
pub fn has_vanishing_proper_subsum(entries: &[i64]) -> bool {
    let l = entries.len();
    if l < 2 {
        return false;
    }
    for mask in 1u32..((1u32 << l) - 1) {
        let sum: i64 = (0..l).filter(|i| mask >> i & 1 == 1).map(|i| entries[i]).sum();
        if sum == 0 {
            return true;
        }
    }
    false
}

/// Divides out the largest common power of `p`: returns the reduced entries
/// and `s' = min_i val_p(entries[i])`. At least one reduced entry is coprime
/// to `p`.
pub fn reduce_by_p_power(entries: &[i64], p: u64) -> Result<(Vec<i64>, u32)> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if entries.contains(&0) {
        return Err(Error::precondition("entries must be nonzero"));
    }
    let p = p as i64;
    let val = |mut x: i64| {
        let mut v = 0u32;
        while x % p == 0 {
            x /= p;
            v += 1;
        }
        v
    };
    let s = entries.iter().map(|&x| val(x)).min().unwrap_or(0);
    let divisor = p.pow(s);
    Ok((entries.iter().map(|&x| x / divisor).collect(), s))
}

/// All M-unit values `±∏ pᵢ^{eᵢ}` with `eᵢ ≤ exp_bound`, descending.
fn value_set(m: &PrimeSet, exp_bound: u32) -> Result<Vec<i64>> {
    let mut magnitudes = vec![1i64];
    for &p in m.primes() {
        let mut next = Vec::with_capacity(magnitudes.len() * (exp_bound as usize + 1));
        for &v in &magnitudes {
            let mut w = v;
            next.push(w);
            for _ in 0..exp_bound {
                w = w.checked_mul(p as i64).ok_or_else(|| {
                    Error::precondition("height bound overflows the value range")
                })?;
                next.push(w);
            }
        }
        magnitudes = next;
    }
    magnitudes.sort_unstable();
    magnitudes.dedup();
    let mut values: Vec<i64> = magnitudes.iter().map(|&v| -v).chain(magnitudes.iter().copied()).collect();
    values.sort_unstable_by(|a, b| b.cmp(a));
    Ok(values)
}

struct Budget {
    used: u64,
    cap: u64,
}

impl Budget {
    fn spend(&mut self, amount: u64) -> Result<()> {
        self.used += amount;
        if self.used > self.cap {
            Err(Error::BudgetExceeded { actual: self.used, budget: self.cap })
        } else {
            Ok(())
        }
    }
}

/// Non-increasing `l`-tuples over `values` (descending) with the given sum.
/// `start` restricts to entries `≤ values[start]`.
fn non_increasing_tuples(
    values: &[i64],
    l: usize,
    target: i64,
    budget: &mut Budget,
) -> Result<Vec<Vec<i64>>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(l);
    let min_value = *values.last().expect("nonempty value set");
    rec(values, 0, l, target, min_value, &mut current, &mut out, budget)?;
    return Ok(out);

    #[allow(clippy::too_many_arguments)]
    fn rec(
        values: &[i64],
        start: usize,
        remaining: usize,
        target: i64,
        min_value: i64,
        current: &mut Vec<i64>,
        out: &mut Vec<Vec<i64>>,
        budget: &mut Budget,
    ) -> Result<()> {
        if remaining == 0 {
            if target == 0 {
                out.push(current.clone());
            }
            return Ok(());
        }
        budget.spend(1)?;
        for idx in start..values.len() {
            let v = values[idx];
            let r = remaining as i64;
            // Entries are non-increasing from v on, so the reachable sums
            // from here lie in [r·min_value, r·v].
            if target > r * v {
                break;
            }
            if target < r * min_value {
                continue;
            }
            current.push(v);
            rec(values, idx, remaining - 1, target - v, min_value, current, out, budget)?;
            current.pop();
        }
        Ok(())
    }
}

/// Meet-in-the-middle: non-increasing `l`-tuples with the given sum, joined
/// from two halves on partial sums with `min(first) ≥ max(second)`.
fn tuples_meet_in_middle(
    values: &[i64],
    l: usize,
    target: i64,
    budget: &mut Budget,
) -> Result<Vec<Vec<i64>>> {
    let first_len = l - l / 2;
    let second_len = l / 2;
    let enumerate_halves = |len: usize, budget: &mut Budget| -> Result<Vec<Vec<i64>>> {
        let mut out = Vec::new();
        let mut current = Vec::with_capacity(len);
        rec_all(values, 0, len, &mut current, &mut out, budget)?;
        return Ok(out);

        fn rec_all(
            values: &[i64],
            start: usize,
            remaining: usize,
            current: &mut Vec<i64>,
            out: &mut Vec<Vec<i64>>,
            budget: &mut Budget,
        ) -> Result<()> {
            if remaining == 0 {
                out.push(current.clone());
                return Ok(());
            }
            budget.spend(1)?;
            for idx in start..values.len() {
                current.push(values[idx]);
                rec_all(values, idx, remaining - 1, current, out, budget)?;
                current.pop();
            }
            Ok(())
        }
    };
    let firsts = enumerate_halves(first_len, budget)?;
    let seconds = enumerate_halves(second_len, budget)?;
    // sum → second halves, sorted by max element (their first entry) so the
    // admissible prefix under a min-constraint is contiguous.
    let mut by_sum: BTreeMap<i64, Vec<&Vec<i64>>> = BTreeMap::new();
    for s in &seconds {
        by_sum.entry(s.iter().sum()).or_default().push(s);
    }
    for group in by_sum.values_mut() {
        group.sort();
    }
    let mut out = Vec::new();
    for first in &firsts {
        let sum: i64 = first.iter().sum();
        let min_first = *first.last().expect("nonempty half");
        if let Some(group) = by_sum.get(&(target - sum)) {
            for second in group {
                budget.spend(1)?;
                if second.first().is_some_and(|&mx| mx > min_first) {
                    continue;
                }
                let mut tuple = first.clone();
                tuple.extend_from_slice(second);
                out.push(tuple);
            }
        }
    }
    Ok(out)
}

/// Candidate accounting for one enumeration run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    pub budget_used: u64,
    pub budget_cap: u64,
}

fn enumerate_tuples(
    values: &[i64],
    l: usize,
    target: i64,
    limits: &Limits,
) -> Result<(Vec<Vec<i64>>, SearchStats)> {
    let mut budget = Budget { used: 0, cap: limits.sunit_budget };
    let tuples = if l >= 4 {
        tuples_meet_in_middle(values, l, target, &mut budget)?
    } else {
        non_increasing_tuples(values, l, target, &mut budget)?
    };
    Ok((tuples, SearchStats { budget_used: budget.used, budget_cap: budget.cap }))
}

/// Canonical zero-sum representative under global negation: of the tuple and
/// its negation (both sorted descending), the one with more positive entries,
/// ties broken lexicographically.
fn negation_canonical(t: &[i64]) -> Vec<i64> {
    let mut neg: Vec<i64> = t.iter().map(|&x| -x).collect();
    neg.sort_unstable_by(|a, b| b.cmp(a));
    let pos = |s: &[i64]| s.iter().filter(|&&x| x > 0).count();
    let t_key = (pos(t), t.to_vec());
    let n_key = (pos(&neg), neg.clone());
    if t_key >= n_key {
        t.to_vec()
    } else {
        neg
    }
}

/// All solutions of `x₁ + … + x_l = 0` in M-units of height `≤ exp_bound`,
/// with `gcd(x₁,…,x_l) = 1` and no vanishing proper subsum, canonical up to
/// permutation and global negation, in descending lexicographic order.
pub fn enumerate_zero_sums(
    m: &PrimeSet,
    l: usize,
    exp_bound: u32,
    limits: &Limits,
) -> Result<Vec<Vec<i64>>> {
    Ok(zero_sums_with_stats(m, l, exp_bound, limits)?.0)
}

/// [`enumerate_zero_sums`] plus candidate accounting.
pub fn zero_sums_with_stats(
    m: &PrimeSet,
    l: usize,
    exp_bound: u32,
    limits: &Limits,
) -> Result<(Vec<Vec<i64>>, SearchStats)> {
    if l < 2 {
        return Err(Error::precondition("zero sums need l ≥ 2"));
    }
    let values = value_set(m, exp_bound)?;
    let (tuples, stats) = enumerate_tuples(&values, l, 0, limits)?;
    let mut out: Vec<Vec<i64>> = tuples
        .into_iter()
        .filter(|t| gcd_of(t) == 1)
        .filter(|t| !has_vanishing_proper_subsum(t))
        .filter(|t| negation_canonical(t) == *t)
        .collect();
    out.sort_unstable_by(|a, b| b.cmp(a));
    out.dedup();
    Ok((out, stats))
}

/// All solutions of `x₁ + … + x_l = p^R` in M-units of height `≤ exp_bound`
/// for `p ∉ M`, with no vanishing proper subsum among the `xᵢ`, canonical up
/// to permutation, in descending lexicographic order.
pub fn enumerate_power_sums(
    m: &PrimeSet,
    l: usize,
    p: u64,
    r: u32,
    exp_bound: u32,
    limits: &Limits,
) -> Result<Vec<Vec<i64>>> {
    Ok(power_sums_with_stats(m, l, p, r, exp_bound, limits)?.0)
}

/// [`enumerate_power_sums`] plus candidate accounting.
pub fn power_sums_with_stats(
    m: &PrimeSet,
    l: usize,
    p: u64,
    r: u32,
    exp_bound: u32,
    limits: &Limits,
) -> Result<(Vec<Vec<i64>>, SearchStats)> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if m.contains(p) {
        return Err(Error::precondition(format!("target prime {p} must lie outside M")));
    }
    if l < 1 {
        return Err(Error::precondition("power sums need l ≥ 1"));
    }
    let target = (p as i64)
        .checked_pow(r)
        .ok_or_else(|| Error::precondition("target power overflows the value range"))?;
    let values = value_set(m, exp_bound)?;
    let (tuples, stats) = enumerate_tuples(&values, l, target, limits)?;
    let mut out: Vec<Vec<i64>> =
        tuples.into_iter().filter(|t| !has_vanishing_proper_subsum(t)).collect();
    out.sort_unstable_by(|a, b| b.cmp(a));
    out.dedup();
    Ok((out, stats))
}

/// Observed solution count next to the symbolic solution-count bound.
/// Purely descriptive: the bound's constants are caller-supplied.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvertseComparison {
    pub primes: Vec<u64>,
    pub l: usize,
    pub exp_bound: u32,
    pub observed: u64,
    pub bound: BoundValue,
}

/// Counts zero-sum solutions at the given height and evaluates the bound
/// `C₁·exp(C₂·n³·log n)` with `n = l − 1` beside it.
pub fn count_vs_evertse(
    m: &PrimeSet,
    l: usize,
    exp_bound: u32,
    c1: f64,
    c2: f64,
    limits: &Limits,
) -> Result<EvertseComparison> {
    let observed = enumerate_zero_sums(m, l, exp_bound, limits)?.len() as u64;
    let bound = evertse_bound(l as u32 - 1, c1, c2)?;
    Ok(EvertseComparison {
        primes: m.primes().to_vec(),
        l,
        exp_bound,
        observed,
        bound,
    })
}
