//! Closed-form subgroup/coset counts and every explicit bound evaluator.
//!
//! The exact count of subgroups of order `p^r` in a group of type `α` is
//!
//! ```text
//! N_α(r) = Σ_{β* ∈ B_α(r)} ∏_{i=1}^{α_1} (α*_i − β*_{i+1} choose β*_i − β*_{i+1})_p · p^{(α*_i − β*_i)·β*_{i+1}}
//! ```
//!
//! summed over conjugates `β*` of the subtypes `β ⊆ α` with `‖β‖ = r`.
//! The pre-asymptotic bounds on rectangular and bounded types, the loss
//! exponent `Λ(L,p) = L + log_p L`, the double-exponential coset-ring length
//! bound, the S-unit solution bound, and the distortion floors all live here,
//! with their free constants taken as caller parameters. Bound comparisons
//! against exact counts are done in exact integer arithmetic (rational
//! exponents are compared by cross-powering), never via floats.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::partition::Partition;
use crate::qbinom::{gaussian_binomial, is_prime, ExactCount};
use crate::{Error, Result};

/// Exact number of subgroups of order `p^r` in the group of type `alpha`.
pub fn count_subgroups(p: u64, alpha: &Partition, r: u32) -> Result<ExactCount> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if r > alpha.weight() {
        return Ok(ExactCount::zero());
    }
    let alpha_star = alpha.conjugate();
    let alpha_1 = alpha.part(0) as usize;
    let mut total = BigUint::zero();
    for beta in alpha.subtypes(r) {
        let beta_star = beta.conjugate();
        let mut term = BigUint::one();
        for i in 1..=alpha_1 {
            let a_i = alpha_star.part(i - 1) as i64;
            let b_i = beta_star.part(i - 1) as i64;
            let b_next = beta_star.part(i) as i64;
            let binom = gaussian_binomial(a_i - b_next, b_i - b_next, p)?;
            term *= binom.0;
            term *= BigUint::from(p).pow(((a_i - b_i) * b_next) as u32);
        }
        total += term;
    }
    Ok(ExactCount(total))
}

/// Exact number of cosets of cardinality `p^r`: the subgroup count times the
/// index `#G/#H = p^{‖α‖−r}`.
pub fn count_cosets(p: u64, alpha: &Partition, r: u32) -> Result<ExactCount> {
    if r > alpha.weight() {
        return Ok(ExactCount::zero());
    }
    let subs = count_subgroups(p, alpha, r)?;
    Ok(ExactCount(subs.0 * BigUint::from(p).pow(alpha.weight() - r)))
}

/// Which side of a sandwich a [`BoundValue`] sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    Exact,
    Upper,
    Lower,
}

/// A bound magnitude. Real-valued bounds downgrade to symbolic nested
/// exponents instead of overflowing: anything above 10^300 is reported as
/// `e^x` or `e^{e^x}` with the exponent kept exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundExpr {
    /// An exact integer.
    Exact(ExactCount),
    /// A finite floating value.
    Real(f64),
    /// `e^x`, for values too large to represent.
    Exp(f64),
    /// `e^{e^x}`, for values whose logarithm is itself too large.
    ExpExp(f64),
}

const REAL_CUTOFF_LN: f64 = 690.0; // ln(10^300) ≈ 690.8

impl BoundExpr {
    /// Builds `e^x` in the widest representable form.
    fn from_ln(x: f64) -> BoundExpr {
        if x <= REAL_CUTOFF_LN {
            BoundExpr::Real(x.exp())
        } else if x.ln() <= REAL_CUTOFF_LN {
            BoundExpr::Exp(x)
        } else {
            BoundExpr::ExpExp(x.ln())
        }
    }

    /// Approximate natural log, usable for monotonicity checks.
    pub fn approx_ln(&self) -> f64 {
        match self {
            BoundExpr::Exact(x) => {
                let s = x.0.to_string();
                // ln(d.ddd × 10^k) from the leading digits.
                let digits = s.len() as f64;
                let lead: f64 = s[..s.len().min(15)].parse().unwrap_or(1.0);
                lead.ln() + (digits - s.len().min(15) as f64) * std::f64::consts::LN_10
            }
            BoundExpr::Real(x) => x.ln(),
            BoundExpr::Exp(x) => *x,
            BoundExpr::ExpExp(x) => {
                debug_assert!(*x > REAL_CUTOFF_LN.ln());
                f64::INFINITY // the log itself overflows; callers compare the inner exponent
            }
        }
    }
}

/// A bound together with the constants it was evaluated with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundValue {
    pub kind: BoundKind,
    pub value: BoundExpr,
    /// Named caller-supplied parameters the value depends on.
    pub constants: BTreeMap<String, f64>,
    /// When the value is `p^{num/den}` exactly, the base and rational
    /// exponent are kept for exact comparisons.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub power_form: Option<PowerForm>,
}

impl BoundValue {
    /// Whether the exact count satisfies this bound, slack included,
    /// decided entirely in integer arithmetic.
    ///
    /// Upper bounds carry an exact integer value plus an optional
    /// `p^{num/den}` slack multiplier; lower bounds carry their whole value
    /// as a power form.
    pub fn admits(&self, exact: &ExactCount) -> bool {
        match self.kind {
            BoundKind::Upper => {
                let BoundExpr::Exact(bound) = &self.value else {
                    unreachable!("upper bounds are exact integers")
                };
                match &self.power_form {
                    // exact ≤ bound·p^{num/den} ⟺ exact^den ≤ bound^den·p^num
                    Some(PowerForm { base, num, den }) if *num >= 0 => {
                        exact.0.pow(*den as u32)
                            <= bound.0.pow(*den as u32) * BigUint::from(*base).pow(*num as u32)
                    }
                    Some(PowerForm { base, num, den }) => {
                        exact.0.pow(*den as u32) * BigUint::from(*base).pow(num.unsigned_abs() as u32)
                            <= bound.0.pow(*den as u32)
                    }
                    None => exact <= bound,
                }
            }
            BoundKind::Lower => self.power_form.as_ref().is_none_or(|form| form.le(exact)),
            BoundKind::Exact => matches!(&self.value, BoundExpr::Exact(v) if v == exact),
        }
    }
}

/// `p^{num/den}` kept exactly for cross-powered integer comparisons.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerForm {
    pub base: u64,
    pub num: i64,
    pub den: i64,
}

impl PowerForm {
    /// `p^{num/den} ≤ x`, decided exactly: `p^num ≤ x^den` for positive
    /// exponent, `1 ≤ p^{−num}·x^den` otherwise.
    pub fn le(&self, x: &ExactCount) -> bool {
        let den = self.den as u32;
        let rhs = x.0.pow(den);
        if self.num >= 0 {
            BigUint::from(self.base).pow(self.num as u32) <= rhs
        } else {
            // p^{num/den} < 1 ≤ x for any positive count.
            !x.0.is_zero()
        }
    }

    pub fn approx(&self) -> f64 {
        (self.base as f64).powf(self.num as f64 / self.den as f64)
    }
}

fn constants(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

/// Pre-asymptotic upper bound `2^{r−1}·p^{Nr + b·r}` with `b = min(r, N)` on
/// the number of order-`p^r` subgroups of the rectangular group `(Z_{p^a})^N`.
/// The degenerate `r = 0` value is clamped to 1.
pub fn subgroup_count_upper_bound(p: u64, n: u32, a: u32, r: u32) -> Result<BoundValue> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if r > n * a {
        return Err(Error::precondition(format!("r={r} exceeds ‖α‖={}", n * a)));
    }
    let b = r.min(n);
    let value = if r == 0 {
        BigUint::one()
    } else {
        BigUint::from(2u64).pow(r - 1) * BigUint::from(p).pow(n * r + b * r)
    };
    Ok(BoundValue {
        kind: BoundKind::Upper,
        value: BoundExpr::Exact(ExactCount(value)),
        constants: constants(&[("b1", b as f64)]),
        power_form: None,
    })
}

/// Pre-asymptotic lower bound `p^{(a/(a−1))Nr − 2r·b1}` on the number of
/// order-`p^r` subgroups of any group of type `γ` with all parts `≤ a−1` and
/// `‖γ‖ = N·a`. Requires `a ≥ 2` and the caller's conjugate-width choice
/// `b1 ≥ r`.
pub fn subgroup_count_lower_bound(p: u64, n: u32, a: u32, r: u32, b1: u32) -> Result<BoundValue> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if a < 2 {
        return Err(Error::precondition("lower bound needs a ≥ 2"));
    }
    if b1 < r {
        return Err(Error::precondition(format!("b1={b1} must be at least r={r}")));
    }
    // exponent = (a/(a−1))·N·r − 2·r·b1, kept as a rational over (a−1).
    let num = (a as i64) * (n as i64) * (r as i64) - 2 * (r as i64) * (b1 as i64) * (a as i64 - 1);
    let den = a as i64 - 1;
    let form = PowerForm { base: p, num, den };
    Ok(BoundValue {
        kind: BoundKind::Lower,
        value: BoundExpr::Real(form.approx()),
        constants: constants(&[("b1", b1 as f64)]),
        power_form: Some(form),
    })
}

/// Coset-count sandwich for cardinality `p^r` in order-`p^{Na}` groups: the
/// subgroup bounds times the index `p^{Na−r}`, widened by the explicit
/// linear slack `p^{±slack_coeff·N}` standing in for the unspecified `O(N)`
/// term.
pub fn coset_count_bounds(
    p: u64,
    n: u32,
    a: u32,
    r: u32,
    slack_coeff: f64,
) -> Result<(BoundValue, BoundValue)> {
    let weight = n * a;
    if r > weight {
        return Err(Error::precondition(format!("r={r} exceeds ‖α‖={weight}")));
    }
    let index_exp = (weight - r) as i64;
    let slack = slack_coeff * n as f64;
    let slack_num = (slack * 2.0).round() as i64; // slack kept as a half-integer exponent
    let upper_sub = subgroup_count_upper_bound(p, n, a, r)?;
    let BoundExpr::Exact(upper_exact) = &upper_sub.value else { unreachable!() };
    // upper · p^{index} · p^{+slack}: exact part stays exact; slack goes into
    // the rational exponent form for exact comparison.
    let upper_value = ExactCount(upper_exact.0.clone() * BigUint::from(p).pow(index_exp as u32));
    let upper = BoundValue {
        kind: BoundKind::Upper,
        value: BoundExpr::Exact(upper_value.clone()),
        constants: constants(&[("slack_coeff", slack_coeff)]),
        power_form: Some(PowerForm { base: p, num: slack_num, den: 2 }),
    };
    let lower_sub = subgroup_count_lower_bound(p, n, a, r, r.max(1))?;
    let lf = lower_sub.power_form.unwrap();
    // lower · p^{index} · p^{−slack}
    let lower_form = PowerForm {
        base: p,
        num: lf.num * 2 + index_exp * 2 * lf.den - slack_num * lf.den,
        den: lf.den * 2,
    };
    let lower = BoundValue {
        kind: BoundKind::Lower,
        value: BoundExpr::Real(lower_form.approx()),
        constants: constants(&[("slack_coeff", slack_coeff), ("b1", r.max(1) as f64)]),
        power_form: Some(lower_form),
    };
    Ok((upper, lower))
}

/// The loss exponent of coset extraction: `Λ(L, p) = L + log_p L`, with the
/// exact integer ceiling that turns it into a size guarantee
/// `p^{K − ceil(Λ)}`.
pub fn lambda_constant(l: u64, p: u64) -> Result<LambdaValue> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if l < 1 {
        return Err(Error::precondition("Λ needs L ≥ 1"));
    }
    let real = l as f64 + (l as f64).ln() / (p as f64).ln();
    // ceil(L + log_p L) = L + ceil(log_p L); the latter is the least k with
    // p^k ≥ L, computed in integers.
    let mut k = 0u32;
    let mut pk = 1u64;
    while pk < l {
        pk = pk.saturating_mul(p);
        k += 1;
    }
    Ok(LambdaValue { real, ceil: l + k as u64 })
}

/// `Λ(L,p)` with its integer ceiling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaValue {
    pub real: f64,
    pub ceil: u64,
}

/// The double-exponential coset-ring length bound `exp(exp(D·C⁴))` for an
/// idempotent of norm `C`. `D` is a caller-supplied universal constant.
pub fn coset_ring_length_bound(c_norm: f64, d: f64) -> Result<BoundValue> {
    if c_norm.is_nan() || c_norm <= 0.0 {
        return Err(Error::precondition("norm must be positive"));
    }
    let inner = d * c_norm.powi(4);
    // Value is e^{e^inner}: once the middle exponent e^inner leaves the
    // floating range, only the innermost exponent is kept.
    let value = if inner <= REAL_CUTOFF_LN {
        BoundExpr::from_ln(inner.exp())
    } else {
        BoundExpr::ExpExp(inner)
    };
    Ok(BoundValue {
        kind: BoundKind::Upper,
        value,
        constants: constants(&[("D", d), ("C_norm", c_norm)]),
        power_form: None,
    })
}

/// The S-unit solution-count bound `C₁·exp(C₂·n³·ln n)`.
pub fn evertse_bound(n: u32, c1: f64, c2: f64) -> Result<BoundValue> {
    if n < 1 {
        return Err(Error::precondition("bound needs n ≥ 1"));
    }
    let ln_n = (n as f64).ln();
    let ln_value = c1.ln() + c2 * (n as f64).powi(3) * ln_n;
    Ok(BoundValue {
        kind: BoundKind::Upper,
        value: BoundExpr::from_ln(ln_value),
        constants: constants(&[("C1", c1), ("C2", c2)]),
        power_form: None,
    })
}

/// Which iterated-logarithm regime a distortion floor is evaluated in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistortionMode {
    /// Target a p-group: `c·(log log n)^{1/4}`.
    PGroup,
    /// Target with no p-subgroup: `c·(log log log n)^{1/4}`.
    NoPSubgroup,
}

/// Least `n` with `log log n ≥ 1`, i.e. `⌈e^e⌉`.
const DOUBLE_LOG_MIN_N: u64 = 16;
/// Least `n` with `log log log n ≥ 1`, i.e. `⌈e^{e^e}⌉`.
const TRIPLE_LOG_MIN_N: u64 = 3_814_280;

/// Distortion growth floor `c·(log log n)^{1/4}` or `c·(log log log n)^{1/4}`
/// (natural logarithms). Rejects `n` below the guard where the iterated
/// logarithm reaches 1 (`n ≥ 16`, resp. `n ≥ 3814280`).
pub fn distortion_floor(n: u64, mode: DistortionMode, c: f64) -> Result<BoundValue> {
    let x = n as f64;
    let iterated = match mode {
        DistortionMode::PGroup => {
            if n < DOUBLE_LOG_MIN_N {
                return Err(Error::precondition(format!(
                    "p-group floor needs n ≥ {DOUBLE_LOG_MIN_N}, got {n}"
                )));
            }
            x.ln().ln()
        }
        DistortionMode::NoPSubgroup => {
            if n < TRIPLE_LOG_MIN_N {
                return Err(Error::precondition(format!(
                    "triple-log floor needs n ≥ {TRIPLE_LOG_MIN_N}, got {n}"
                )));
            }
            x.ln().ln().ln()
        }
    };
    Ok(BoundValue {
        kind: BoundKind::Lower,
        value: BoundExpr::Real(c * iterated.powf(0.25)),
        constants: constants(&[("c", c)]),
        power_form: None,
    })
}

/// A class of groups `⊕_j (Z_{q_j^{s_j}})^ω`, described by its list of
/// prime-power factor shapes. Primes may repeat.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupClassSpec {
    pub factors: Vec<PrimePowerFactor>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimePowerFactor {
    pub prime: u64,
    pub exponent: u32,
}

impl GroupClassSpec {
    pub fn new(factors: Vec<(u64, u32)>) -> Result<Self> {
        for &(q, s) in &factors {
            if !is_prime(q) {
                return Err(Error::NotPrime(q));
            }
            if s == 0 {
                return Err(Error::precondition("factor exponents must be ≥ 1"));
            }
        }
        Ok(GroupClassSpec {
            factors: factors
                .into_iter()
                .map(|(prime, exponent)| PrimePowerFactor { prime, exponent })
                .collect(),
        })
    }
}

/// Representability of one character system inside another: true iff every
/// factor `(p, s)` of `source` has a factor `(q, r)` of `target` with
/// `p = q` and `s ≤ r`.
pub fn representable(source: &GroupClassSpec, target: &GroupClassSpec) -> bool {
    source.factors.iter().all(|f| {
        target.factors.iter().any(|g| g.prime == f.prime && f.exponent <= g.exponent)
    })
}
