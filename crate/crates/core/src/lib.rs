//! Exact-arithmetic toolkit for finite abelian p-groups and their coset
//! combinatorics.
//!
//! The crate models groups of the form `⊕ᵢ Z_{p^{αᵢ}}` concretely (elements as
//! residue vectors, subgroups as canonical generator matrices) and provides:
//!
//! - [`partition`] — integer partitions, conjugation, and subtype enumeration;
//! - [`qbinom`] — exact Gaussian binomial coefficients `(n choose m)_p`;
//! - [`abelian`] — the group model, canonical subgroups/cosets, and exhaustive
//!   enumeration used as a brute-force oracle;
//! - [`counting`] — the closed-form subgroup/coset counts, pre-asymptotic
//!   bounds, and the explicit constant evaluators (Λ, double-exponential
//!   idempotent bound, S-unit solution bound, distortion floors);
//! - [`cosetring`] — signed combinations of coset indicators and the
//!   constructive extraction of a large coset from an indicator;
//! - [`spectral`] — characters, Fourier-algebra norms, pushforwards along
//!   character injections, and distortion witnesses;
//! - [`sunit`] — bounded-height enumeration of S-unit equation solutions;
//! - [`verify`] — the formula-vs-oracle verification grids behind the CLI's
//!   `verify` subcommand.
//!
//! Counting is exact everywhere: subgroup counts are arbitrary-precision
//! integers and bound comparisons are performed in exact arithmetic (rational
//! exponents compared by cross-powering), never through floats.

pub mod abelian;
pub mod counting;
pub mod cosetring;
mod lattice;
pub mod partition;
pub mod qbinom;
pub mod spectral;
pub mod sunit;
pub mod verify;

use thiserror::Error;

/// Errors shared across the crate.
///
/// `CapExceeded` and `BudgetExceeded` are resource guards (CLI exit code 2);
/// everything else is a precondition violation (exit code 1).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("enumeration cap exceeded: {actual} > {cap} ({what})")]
    CapExceeded { what: String, actual: u128, cap: u128 },
    #[error("search budget exceeded: {actual} > {budget} candidates")]
    BudgetExceeded { actual: u64, budget: u64 },
    #[error("dimension mismatch: expected {expected} coordinates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("coordinate {value} out of range [0, {modulus}) at position {index}")]
    CoordinateOutOfRange { index: usize, value: u64, modulus: u64 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("combination is not a 0/1 indicator (value {value} at element {element:?})")]
    NotIndicator { element: Vec<u64>, value: i64 },
    #[error("set size {size} is not a power of {p}")]
    NotPrimePower { size: u64, p: u64 },
    #[error("extraction failed: {0}")]
    ExtractionFailure(String),
    #[error("witness has zero norm")]
    ZeroNormWitness,
}

impl Error {
    fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    /// True for resource-limit errors (cap/budget), as opposed to bad inputs.
    pub fn is_resource_limit(&self) -> bool {
        matches!(self, Error::CapExceeded { .. } | Error::BudgetExceeded { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// Resource limits for the exhaustive operations.
///
/// All enumerations are desk-scale by design; these caps guard against
/// accidental combinatorial explosions rather than tune performance.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct Limits {
    /// Largest group order for subgroup/coset enumeration and norm evaluation.
    pub enumeration_cap: u64,
    /// Largest group order for the exponential minimal-representation search.
    pub minrep_cap: u64,
    /// Largest group order for the exhaustive subset survey (2^order rows).
    pub survey_cap: u64,
    /// Candidate-tuple budget for S-unit enumeration.
    pub sunit_budget: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            enumeration_cap: 1 << 12,
            minrep_cap: 1 << 5,
            survey_cap: 1 << 5,
            sunit_budget: 10_000_000,
        }
    }
}
