//! Integer partitions: the "type" of a finite abelian p-group.
//!
//! A partition is stored as its positive parts in weakly decreasing order;
//! indexing past the end reads as 0, so containment and conjugation are total.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A weakly decreasing sequence of positive integers. The empty sequence is
/// the zero partition.
///
/// Serializes as a plain JSON array, e.g. `[3,1]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Partition {
    parts: Vec<u32>,
}

impl Partition {
    /// Builds a partition, rejecting zero parts and out-of-order sequences.
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        for window in parts.windows(2) {
            if window[0] < window[1] {
                return Err(Error::precondition(format!(
                    "partition parts must be weakly decreasing, got {parts:?}"
                )));
            }
        }
        if parts.contains(&0) {
            return Err(Error::precondition(format!(
                "partition parts must be positive, got {parts:?}"
            )));
        }
        Ok(Partition { parts })
    }

    /// Builds a partition from parts in any order, dropping zeros.
    pub fn from_unsorted(mut parts: Vec<u32>) -> Self {
        parts.retain(|&x| x > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition { parts }
    }

    /// The empty (zero) partition.
    pub fn zero() -> Self {
        Partition { parts: Vec::new() }
    }

    /// A rectangular partition: `count` copies of `part`.
    pub fn rectangular(part: u32, count: usize) -> Self {
        if part == 0 {
            return Partition::zero();
        }
        Partition { parts: vec![part; count] }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    /// Number of positive parts.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// The `i`-th part (0-based); 0 beyond the length.
    pub fn part(&self, i: usize) -> u32 {
        self.parts.get(i).copied().unwrap_or(0)
    }

    /// Sum of the parts.
    pub fn weight(&self) -> u32 {
        self.parts.iter().sum()
    }

    /// The conjugate partition: part `i` of the result counts parts of `self`
    /// that are `≥ i+1` (transpose of the Young diagram).
    pub fn conjugate(&self) -> Partition {
        let largest = self.part(0) as usize;
        let mut parts = Vec::with_capacity(largest);
        for i in 1..=largest {
            let count = self.parts.iter().take_while(|&&x| x as usize >= i).count();
            parts.push(count as u32);
        }
        Partition { parts }
    }

    /// Containment: `other ⊆ self` iff every part of `other` is at most the
    /// corresponding part of `self` (missing parts read as 0).
    pub fn contains(&self, other: &Partition) -> bool {
        (0..other.len()).all(|i| other.part(i) <= self.part(i))
    }

    /// All partitions `β ⊆ self` with `weight(β) = r`, in lexicographically
    /// descending order. Empty when `r > weight(self)`.
    pub fn subtypes(&self, r: u32) -> Vec<Partition> {
        let mut out = Vec::new();
        let mut current = Vec::new();
        self.subtypes_rec(r, 0, u32::MAX, &mut current, &mut out);
        out
    }

    fn subtypes_rec(
        &self,
        remaining: u32,
        index: usize,
        max_part: u32,
        current: &mut Vec<u32>,
        out: &mut Vec<Partition>,
    ) {
        if remaining == 0 {
            out.push(Partition { parts: current.clone() });
            return;
        }
        // Parts are generated largest-first, which yields descending
        // lexicographic output order.
        let bound = max_part.min(self.part(index));
        if bound == 0 {
            return;
        }
        for part in (1..=bound).rev() {
            if part > remaining {
                continue;
            }
            current.push(part);
            self.subtypes_rec(remaining - part, index + 1, part, current, out);
            current.pop();
        }
    }
}

impl std::fmt::Display for Partition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, part) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{part}")?;
        }
        write!(f, ")")
    }
}

impl TryFrom<Vec<u32>> for Partition {
    type Error = Error;
    fn try_from(parts: Vec<u32>) -> Result<Self> {
        Partition::new(parts)
    }
}

impl From<Partition> for Vec<u32> {
    fn from(p: Partition) -> Vec<u32> {
        p.parts
    }
}

/// All partitions of `n` (unrestricted), descending lexicographic. Brute-force
/// generator used by oracles and tests.
pub fn partitions_of(n: u32) -> Vec<Partition> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    partitions_of_rec(n, n.max(1), &mut current, &mut out);
    out
}

fn partitions_of_rec(remaining: u32, max_part: u32, current: &mut Vec<u32>, out: &mut Vec<Partition>) {
    if remaining == 0 {
        out.push(Partition { parts: current.clone() });
        return;
    }
    for part in (1..=max_part.min(remaining)).rev() {
        current.push(part);
        partitions_of_rec(remaining - part, part, current, out);
        current.pop();
    }
}
