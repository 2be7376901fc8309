//! Exact Gaussian binomial coefficients and prime-power arithmetic.
//!
//! `(n choose m)_p = ∏_{i=1}^{m} (p^{n−m+i} − 1)/(p^i − 1)` counts the
//! m-dimensional subspaces of an n-dimensional vector space over the field
//! with p elements. Everything here is arbitrary-precision and exact; the
//! running product is an integer after every factor pair, which we assert.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// An exact nonnegative integer count. Serializes as a decimal string in
/// JSON: subgroup counts overflow fixed-width integers quickly.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct ExactCount(pub BigUint);

impl ExactCount {
    pub fn one() -> Self {
        ExactCount(BigUint::one())
    }

    pub fn zero() -> Self {
        ExactCount(BigUint::zero())
    }

    pub fn to_u64(&self) -> Option<u64> {
        u64::try_from(&self.0).ok()
    }

    pub fn to_u128(&self) -> Option<u128> {
        u128::try_from(&self.0).ok()
    }
}

impl From<u64> for ExactCount {
    fn from(x: u64) -> Self {
        ExactCount(BigUint::from(x))
    }
}

impl From<u128> for ExactCount {
    fn from(x: u128) -> Self {
        ExactCount(BigUint::from(x))
    }
}

impl From<BigUint> for ExactCount {
    fn from(x: BigUint) -> Self {
        ExactCount(x)
    }
}

impl TryFrom<String> for ExactCount {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse::<BigUint>()
            .map(ExactCount)
            .map_err(|_| Error::precondition(format!("invalid decimal integer: {s:?}")))
    }
}

impl From<ExactCount> for String {
    fn from(x: ExactCount) -> String {
        x.0.to_string()
    }
}

impl std::fmt::Display for ExactCount {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Deterministic trial-division primality test; inputs here are desk-scale.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

fn require_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p))
    }
}

/// `p^e`, exactly. Rejects non-prime `p`.
pub fn prime_power(p: u64, e: u32) -> Result<ExactCount> {
    require_prime(p)?;
    Ok(ExactCount(BigUint::from(p).pow(e)))
}

/// The Gaussian binomial `(n choose m)_p`.
///
/// Returns 1 for `m = 0` with `n ≥ 0` (empty product) and 0 for `m < 0`,
/// `m > n`, or `n < 0`. The `m = 0` case is the empty-product convention;
/// it is the one under which the subgroup-counting formula reproduces
/// brute-force counts.
pub fn gaussian_binomial(n: i64, m: i64, p: u64) -> Result<ExactCount> {
    require_prime(p)?;
    if n < 0 || m < 0 || m > n {
        return Ok(ExactCount::zero());
    }
    let p = BigUint::from(p);
    let mut acc = BigUint::one();
    for i in 1..=m {
        let numerator = p.pow((n - m + i) as u32) - 1u32;
        let denominator = p.pow(i as u32) - 1u32;
        let (q, rem) = (acc * numerator).div_rem(&denominator);
        // Each complete factor pair leaves an integer: the running product is
        // itself a Gaussian binomial.
        debug_assert!(rem.is_zero());
        if !rem.is_zero() {
            return Err(Error::precondition(format!(
                "gaussian_binomial({n},{m},{p}): non-exact division"
            )));
        }
        acc = q;
    }
    Ok(ExactCount(acc))
}
