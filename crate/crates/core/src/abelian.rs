//! Concrete finite abelian p-groups `⊕ᵢ Z_{p^{αᵢ}}`.
//!
//! Elements are residue vectors, subgroups are canonical Hermite generator
//! matrices, cosets carry their lexicographically least representative.
//! Exhaustive enumeration of subgroups and cosets lives here and serves as
//! the brute-force oracle for the closed-form counts in [`crate::counting`].

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::lattice::{self, Ctx, Hnf};
use crate::partition::Partition;
use crate::qbinom::{is_prime, ExactCount};
use crate::{Error, Limits, Result};

/// A finite abelian p-group presented by its prime and type partition.
///
/// The group of type `α = (α_1 ≥ α_2 ≥ …)` is `⊕ᵢ Z_{p^{αᵢ}}`, of order
/// `p^{‖α‖}`. JSON form: `{"p":2,"type":[2,1]}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "GroupSpecJson", into = "GroupSpecJson")]
pub struct GroupSpec {
    p: u64,
    ty: Partition,
}

#[derive(Serialize, Deserialize)]
struct GroupSpecJson {
    p: u64,
    #[serde(rename = "type")]
    ty: Partition,
}

impl TryFrom<GroupSpecJson> for GroupSpec {
    type Error = Error;
    fn try_from(j: GroupSpecJson) -> Result<Self> {
        GroupSpec::new(j.p, j.ty)
    }
}

impl From<GroupSpec> for GroupSpecJson {
    fn from(g: GroupSpec) -> GroupSpecJson {
        GroupSpecJson { p: g.p, ty: g.ty }
    }
}

impl GroupSpec {
    pub fn new(p: u64, ty: Partition) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(GroupSpec { p, ty })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn group_type(&self) -> &Partition {
        &self.ty
    }

    /// Number of cyclic factors (coordinates of an element).
    pub fn rank(&self) -> usize {
        self.ty.len()
    }

    /// `p^{‖α‖}`, exactly.
    pub fn order(&self) -> ExactCount {
        ExactCount(BigUint::from(self.p).pow(self.ty.weight()))
    }

    /// The order as `u64` when it fits (all desk-scale groups).
    pub fn order_u64(&self) -> Option<u64> {
        self.order().to_u64()
    }

    pub(crate) fn ctx(&self) -> Ctx {
        Ctx::new(self.p, &self.ty)
    }

    pub fn zero(&self) -> Element {
        Element(vec![0; self.rank()])
    }

    /// Validates that `x` has the right arity and in-range coordinates.
    pub fn validate_element(&self, x: &Element) -> Result<()> {
        if x.0.len() != self.rank() {
            return Err(Error::DimensionMismatch { expected: self.rank(), got: x.0.len() });
        }
        for (i, &c) in x.0.iter().enumerate() {
            let m = (self.p as u128).pow(self.ty.part(i));
            if (c as u128) >= m {
                return Err(Error::CoordinateOutOfRange { index: i, value: c, modulus: m as u64 });
            }
        }
        Ok(())
    }

    pub fn add(&self, a: &Element, b: &Element) -> Element {
        let ctx = self.ctx();
        Element(
            (0..self.rank())
                .map(|l| ((a.0[l] as i64 + b.0[l] as i64).rem_euclid(ctx.m[l])) as u64)
                .collect(),
        )
    }

    pub fn neg(&self, a: &Element) -> Element {
        let ctx = self.ctx();
        Element((0..self.rank()).map(|l| ((-(a.0[l] as i64)).rem_euclid(ctx.m[l])) as u64).collect())
    }

    pub fn sub(&self, a: &Element, b: &Element) -> Element {
        self.add(a, &self.neg(b))
    }

    pub fn scale(&self, k: i64, a: &Element) -> Element {
        let ctx = self.ctx();
        Element((0..self.rank()).map(|l| ((k * a.0[l] as i64).rem_euclid(ctx.m[l])) as u64).collect())
    }

    /// All elements, in ascending lexicographic order.
    pub fn elements(&self) -> Vec<Element> {
        let ctx = self.ctx();
        let n = ctx.n();
        let total: u64 = ctx.m.iter().map(|&m| m as u64).product();
        let mut out = Vec::with_capacity(total as usize);
        let mut coords = vec![0u64; n];
        loop {
            out.push(Element(coords.clone()));
            let mut l = n;
            loop {
                if l == 0 {
                    return out;
                }
                l -= 1;
                coords[l] += 1;
                if coords[l] < ctx.m[l] as u64 {
                    break;
                }
                coords[l] = 0;
            }
        }
    }

    fn check_cap(&self, limits: &Limits) -> Result<()> {
        let cap = BigUint::from(limits.enumeration_cap);
        let order = self.order().0;
        if order > cap {
            return Err(Error::CapExceeded {
                what: format!("group order for {self:?}"),
                actual: u128::try_from(&order).unwrap_or(u128::MAX),
                cap: limits.enumeration_cap as u128,
            });
        }
        Ok(())
    }
}

/// A group element: one residue per cyclic factor, `coords[i] ∈ [0, p^{αᵢ})`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Element(pub Vec<u64>);

impl Element {
    pub(crate) fn to_i64(&self) -> Vec<i64> {
        self.0.iter().map(|&c| c as i64).collect()
    }

    pub(crate) fn from_i64(v: &[i64]) -> Element {
        Element(v.iter().map(|&c| c as u64).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }
}

/// A subgroup in canonical form.
///
/// Internally a full Hermite matrix over the ambient residue rings; two
/// generator sets spanning the same subgroup always canonicalize to the same
/// matrix, so equality and ordering are structural. JSON form:
/// `{"group":…, "generators":[[…],…]}` with canonical generators on output.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "SubgroupJson", into = "SubgroupJson")]
pub struct Subgroup {
    group: GroupSpec,
    hnf: Hnf,
}

#[derive(Serialize, Deserialize)]
struct SubgroupJson {
    group: GroupSpec,
    generators: Vec<Element>,
}

impl TryFrom<SubgroupJson> for Subgroup {
    type Error = Error;
    fn try_from(j: SubgroupJson) -> Result<Self> {
        subgroup_from_generators(&j.group, &j.generators)
    }
}

impl From<Subgroup> for SubgroupJson {
    fn from(h: Subgroup) -> SubgroupJson {
        SubgroupJson { generators: h.generators(), group: h.group }
    }
}

impl Subgroup {
    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    /// The trivial subgroup.
    pub fn trivial(group: &GroupSpec) -> Subgroup {
        let ctx = group.ctx();
        Subgroup { group: group.clone(), hnf: Hnf::m_lattice(&ctx) }
    }

    /// The whole group as a subgroup of itself.
    pub fn full(group: &GroupSpec) -> Subgroup {
        let ctx = group.ctx();
        let gens: Vec<Element> = (0..group.rank())
            .map(|i| {
                let mut v = vec![0u64; group.rank()];
                v[i] = 1;
                Element(v)
            })
            .collect();
        let rows: Vec<Vec<i64>> = gens.iter().map(|g| g.to_i64()).collect();
        Subgroup { group: group.clone(), hnf: lattice::hnf_from_generators(&ctx, &rows) }
    }

    /// Canonical generators: the Hermite rows with nonzero projection.
    pub fn generators(&self) -> Vec<Element> {
        let ctx = self.group.ctx();
        let n = ctx.n();
        let mut out = Vec::new();
        for l in 0..n {
            if self.hnf.pivot_exp[l] < ctx.alpha[l] {
                let row = self.hnf.row(l);
                out.push(Element(row.iter().map(|&x| x as u64).collect()));
            }
        }
        out
    }

    /// `log_p` of the subgroup order.
    pub fn order_exp(&self) -> u32 {
        self.hnf.order_exp(&self.group.ctx())
    }

    pub fn order(&self) -> ExactCount {
        ExactCount(BigUint::from(self.group.p).pow(self.order_exp()))
    }

    /// `log_p` of the index `[G : H]`.
    pub fn index_exp(&self) -> u32 {
        self.hnf.index_exp()
    }

    /// Membership, assuming `x` is a valid element of the ambient group.
    pub fn contains(&self, x: &Element) -> bool {
        let ctx = self.group.ctx();
        self.hnf.contains(&ctx, &x.to_i64(), 0)
    }

    /// All elements of the subgroup, ascending.
    pub fn elements(&self) -> Vec<Element> {
        let ctx = self.group.ctx();
        let n = ctx.n();
        let mut out = Vec::new();
        let mut digits = vec![0i64; n];
        let radices: Vec<i64> =
            (0..n).map(|l| ctx.pp[(ctx.alpha[l] - self.hnf.pivot_exp[l]) as usize]).collect();
        loop {
            let mut v = vec![0i64; n];
            for l in 0..n {
                if digits[l] != 0 {
                    for t in l..n {
                        v[t] += digits[l] * self.hnf.row(l)[t];
                    }
                }
            }
            for l in 0..n {
                v[l] = v[l].rem_euclid(ctx.m[l]);
            }
            out.push(Element::from_i64(&v));
            let mut l = n;
            loop {
                if l == 0 {
                    out.sort();
                    return out;
                }
                l -= 1;
                if radices[l] > 1 {
                    digits[l] += 1;
                    if digits[l] < radices[l] {
                        break;
                    }
                    digits[l] = 0;
                }
            }
        }
    }

    /// The isomorphism type of the subgroup: `H ≅ ⊕ᵢ Z_{p^{βᵢ}}`.
    ///
    /// Computed from layer orders: the k-th conjugate part of the type is
    /// `log_p #(p^{k−1}H) − log_p #(p^k H)`.
    pub fn subgroup_type(&self) -> Partition {
        let ctx = self.group.ctx();
        let gens: Vec<Vec<i64>> = self.generators().iter().map(|g| g.to_i64()).collect();
        let mut exps = vec![self.order_exp()];
        let mut k = 1u32;
        while *exps.last().unwrap() > 0 {
            let pk = (self.group.p as i64).pow(k);
            let scaled: Vec<Vec<i64>> =
                gens.iter().map(|g| g.iter().map(|&x| x * pk).collect()).collect();
            let h = lattice::hnf_from_generators(&ctx, &scaled);
            exps.push(h.order_exp(&ctx));
            k += 1;
        }
        let beta_star: Vec<u32> = exps.windows(2).map(|w| w[0] - w[1]).collect();
        Partition::from_unsorted(beta_star).conjugate()
    }

    /// All cosets of this subgroup, by canonical representative, ascending.
    pub fn cosets(&self) -> Vec<Coset> {
        let ctx = self.group.ctx();
        let n = ctx.n();
        let mut out = Vec::new();
        let mut digits = vec![0u64; n];
        loop {
            out.push(Coset {
                subgroup: self.clone(),
                representative: Element(digits.clone()),
            });
            let mut l = n;
            loop {
                if l == 0 {
                    return out;
                }
                l -= 1;
                let radix = ctx.pp[self.hnf.pivot_exp[l] as usize] as u64;
                if radix > 1 {
                    digits[l] += 1;
                    if digits[l] < radix {
                        break;
                    }
                    digits[l] = 0;
                }
            }
        }
    }

    /// The coset of this subgroup containing `x`.
    pub fn coset_of(&self, x: &Element) -> Coset {
        let ctx = self.group.ctx();
        let mut v = x.to_i64();
        self.hnf.box_reduce(&ctx, &mut v, 0);
        Coset { subgroup: self.clone(), representative: Element::from_i64(&v) }
    }
}

/// A coset `representative + subgroup`, with the representative canonical:
/// it is the lexicographically least member.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Coset {
    subgroup: Subgroup,
    representative: Element,
}

impl Coset {
    pub fn new(subgroup: Subgroup, member: &Element) -> Coset {
        subgroup.coset_of(member)
    }

    pub fn subgroup(&self) -> &Subgroup {
        &self.subgroup
    }

    pub fn representative(&self) -> &Element {
        &self.representative
    }

    pub fn group(&self) -> &GroupSpec {
        self.subgroup.group()
    }

    pub fn size_exp(&self) -> u32 {
        self.subgroup.order_exp()
    }

    pub fn contains(&self, x: &Element) -> bool {
        let diff = self.group().sub(x, &self.representative);
        self.subgroup.contains(&diff)
    }

    pub fn elements(&self) -> Vec<Element> {
        let g = self.group().clone();
        let mut out: Vec<Element> =
            self.subgroup.elements().iter().map(|h| g.add(h, &self.representative)).collect();
        out.sort();
        out
    }

    /// Translate by `t`.
    pub fn translate(&self, t: &Element) -> Coset {
        let rep = self.group().add(&self.representative, t);
        self.subgroup.coset_of(&rep)
    }
}

/// `p^{‖α‖}`: order of the group.
pub fn order(group: &GroupSpec) -> ExactCount {
    group.order()
}

/// Canonicalizes the span of `gens` into a [`Subgroup`]. Idempotent: feeding
/// back the canonical generators reproduces the same matrix.
pub fn subgroup_from_generators(group: &GroupSpec, gens: &[Element]) -> Result<Subgroup> {
    let ctx = group.ctx();
    for g in gens {
        group.validate_element(g)?;
    }
    let rows: Vec<Vec<i64>> = gens.iter().map(|g| g.to_i64()).collect();
    Ok(Subgroup { group: group.clone(), hnf: lattice::hnf_from_generators(&ctx, &rows) })
}

/// Membership with element validation.
pub fn membership(subgroup: &Subgroup, x: &Element) -> Result<bool> {
    subgroup.group().validate_element(x)?;
    Ok(subgroup.contains(x))
}

fn order_to_exp(group: &GroupSpec, order: &ExactCount) -> Option<u32> {
    let p = BigUint::from(group.p());
    let mut value = order.0.clone();
    let mut r = 0u32;
    while value > BigUint::one() {
        if &value % &p != BigUint::ZERO {
            return None;
        }
        value /= &p;
        r += 1;
    }
    if r > group.group_type().weight() {
        None
    } else {
        Some(r)
    }
}

/// All subgroups of the given order, canonical and sorted. Returns an empty
/// list when the order is not a power of `p` dividing `#G`.
pub fn enumerate_subgroups(
    group: &GroupSpec,
    order: &ExactCount,
    limits: &Limits,
) -> Result<Vec<Subgroup>> {
    group.check_cap(limits)?;
    let Some(r) = order_to_exp(group, order) else {
        return Ok(Vec::new());
    };
    let ctx = group.ctx();
    let mut out = Vec::new();
    lattice::scan_subgroups(&ctx, Some(r), false, |leaf| {
        out.push(Subgroup { group: group.clone(), hnf: leaf.hnf.clone() });
    });
    out.sort();
    Ok(out)
}

/// All cosets of all subgroups of the given order, canonical and sorted.
pub fn enumerate_cosets(group: &GroupSpec, order: &ExactCount, limits: &Limits) -> Result<Vec<Coset>> {
    let subgroups = enumerate_subgroups(group, order, limits)?;
    let mut out = Vec::new();
    for h in subgroups {
        out.extend(h.cosets());
    }
    out.sort();
    Ok(out)
}

/// Streaming census: number of subgroups of order `p^r` for each `r`, by
/// exhaustive enumeration (nothing is materialized). This is the scalable
/// brute-force oracle behind the formula checks.
pub fn subgroup_order_census(group: &GroupSpec, limits: &Limits) -> Result<Vec<u128>> {
    group.check_cap(limits)?;
    Ok(lattice::subgroup_census(&group.ctx()))
}

/// Streaming census of cosets per subgroup order: every canonical coset
/// representative is walked and counted.
pub fn coset_order_census(group: &GroupSpec, limits: &Limits) -> Result<Vec<u128>> {
    group.check_cap(limits)?;
    Ok(lattice::coset_census(&group.ctx()))
}

/// Streaming visit of `(order_exp, conjugate_type)` for every subgroup.
/// The conjugate type arrives as `β*` (parts of the type counted by layer).
pub fn for_each_subgroup_type(
    group: &GroupSpec,
    limits: &Limits,
    mut f: impl FnMut(u32, &[u32]),
) -> Result<()> {
    group.check_cap(limits)?;
    let ctx = group.ctx();
    lattice::scan_subgroups(&ctx, None, true, |leaf| {
        f(leaf.order_exp, leaf.beta_star.expect("type tracking enabled"));
    });
    Ok(())
}

fn rectangular_exponent(group: &GroupSpec) -> Result<u32> {
    let ty = group.group_type();
    let a = ty.part(0);
    if ty.parts().iter().any(|&x| x != a) {
        return Err(Error::precondition(format!(
            "ambient type must be rectangular (a,…,a), got {ty}"
        )));
    }
    Ok(a)
}

/// In a rectangular ambient `(Z_{p^a})^N`: the number of parts of the
/// subgroup type equal to `a`, i.e. the largest `k` with a copy of
/// `(Z_{p^a})^k` inside `H`.
pub fn max_free_rank(ambient: &GroupSpec, subgroup: &Subgroup, a: u32) -> Result<u32> {
    let ambient_a = rectangular_exponent(ambient)?;
    if ambient_a != a {
        return Err(Error::precondition(format!(
            "ambient exponent is {ambient_a}, caller expected {a}"
        )));
    }
    let ty = subgroup.subgroup_type();
    Ok(ty.parts().iter().filter(|&&x| x == a).count() as u32)
}

/// Order bound from bounded free rank, as a checkable predicate: if
/// `H ≤ (Z_{p^a})^N` contains no copy of `(Z_{p^a})^{k+1}` then
/// `#H < p^{ak + (a−1)(N−k)}` (strict). Returns the truth of the implication
/// for this `(H, k)`; equality cases at the boundary therefore come back
/// `false` and are reported by callers, not patched.
pub fn free_rank_order_bound(ambient: &GroupSpec, subgroup: &Subgroup, k: u32) -> Result<bool> {
    let a = rectangular_exponent(ambient)?;
    let n = ambient.rank() as u32;
    let free_rank = max_free_rank(ambient, subgroup, a)?;
    if free_rank >= k + 1 {
        return Ok(true);
    }
    let bound_exp = (a as u64) * (k as u64) + (a as u64 - 1) * (n.saturating_sub(k) as u64);
    Ok((subgroup.order_exp() as u64) < bound_exp)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn group(p: u64, parts: &[u32]) -> GroupSpec {
        GroupSpec::new(p, Partition::new(parts.to_vec()).unwrap()).unwrap()
    }

    fn el(coords: &[u64]) -> Element {
        Element(coords.to_vec())
    }

    #[test]
    fn order_examples() {
        assert_eq!(group(2, &[1, 1, 1]).order(), ExactCount::from(8u64));
        assert_eq!(GroupSpec::new(3, Partition::zero()).unwrap().order(), ExactCount::one());
        assert_eq!(group(2, &[2, 1]).order(), ExactCount::from(8u64));
        assert!(GroupSpec::new(6, Partition::zero()).is_err());
    }

    #[test]
    fn span_examples() {
        let g = group(2, &[2, 1]);
        let trivial = subgroup_from_generators(&g, &[g.zero()]).unwrap();
        assert_eq!(trivial.order(), ExactCount::one());
        assert_eq!(trivial, Subgroup::trivial(&g));

        let whole = subgroup_from_generators(&g, &[el(&[1, 0]), el(&[0, 1])]).unwrap();
        assert_eq!(whole.order(), ExactCount::from(8u64));
        assert_eq!(whole, Subgroup::full(&g));

        let h = subgroup_from_generators(&g, &[el(&[2, 1])]).unwrap();
        assert_eq!(h.order(), ExactCount::from(2u64));
        assert_eq!(h.elements(), vec![el(&[0, 0]), el(&[2, 1])]);

        // Re-canonicalization is idempotent.
        let again = subgroup_from_generators(&g, &h.generators()).unwrap();
        assert_eq!(again, h);

        assert!(subgroup_from_generators(&g, &[el(&[4, 0])]).is_err());
        assert!(subgroup_from_generators(&g, &[el(&[1])]).is_err());
    }

    #[test]
    fn membership_examples() {
        let g = group(2, &[2, 1]);
        let trivial = Subgroup::trivial(&g);
        assert!(membership(&trivial, &g.zero()).unwrap());
        assert!(!membership(&trivial, &el(&[2, 0])).unwrap());

        let h = subgroup_from_generators(&g, &[el(&[2, 1])]).unwrap();
        assert!(!membership(&h, &el(&[2, 0])).unwrap());
        assert!(membership(&h, &el(&[2, 1])).unwrap());
        assert!(membership(&h, &el(&[1])).is_err());
    }

    #[test]
    fn subgroup_type_examples() {
        let g = group(2, &[2, 1]);
        assert_eq!(Subgroup::trivial(&g).subgroup_type(), Partition::zero());
        assert_eq!(Subgroup::full(&g).subgroup_type(), Partition::new(vec![2, 1]).unwrap());
        let h = subgroup_from_generators(&g, &[el(&[2, 1])]).unwrap();
        assert_eq!(h.subgroup_type(), Partition::new(vec![1]).unwrap());
        // Cyclic of order 4 inside Z_4 ⊕ Z_2.
        let c4 = subgroup_from_generators(&g, &[el(&[1, 1])]).unwrap();
        assert_eq!(c4.subgroup_type(), Partition::new(vec![2]).unwrap());
    }

    #[test]
    fn enumeration_examples() {
        let limits = Limits::default();
        let z2cube = group(2, &[1, 1, 1]);
        assert_eq!(enumerate_subgroups(&z2cube, &ExactCount::from(2u64), &limits).unwrap().len(), 7);
        assert_eq!(enumerate_subgroups(&z2cube, &ExactCount::one(), &limits).unwrap().len(), 1);
        let z4z2 = group(2, &[2, 1]);
        assert_eq!(enumerate_subgroups(&z4z2, &ExactCount::from(2u64), &limits).unwrap().len(), 3);
        // Non-p-power order: empty.
        assert!(enumerate_subgroups(&z4z2, &ExactCount::from(6u64), &limits).unwrap().is_empty());
        assert!(enumerate_subgroups(&z4z2, &ExactCount::from(16u64), &limits).unwrap().is_empty());

        let z2sq = group(2, &[1, 1]);
        assert_eq!(enumerate_cosets(&z2sq, &ExactCount::from(2u64), &limits).unwrap().len(), 6);
        assert_eq!(enumerate_cosets(&z2sq, &ExactCount::from(4u64), &limits).unwrap().len(), 1);
        assert_eq!(enumerate_cosets(&z2cube, &ExactCount::from(4u64), &limits).unwrap().len(), 14);
    }

    #[test]
    fn enumeration_respects_cap() {
        let limits = Limits { enumeration_cap: 4, ..Limits::default() };
        let g = group(2, &[1, 1, 1]);
        let err = enumerate_subgroups(&g, &ExactCount::from(2u64), &limits).unwrap_err();
        assert!(err.is_resource_limit());
    }

    #[test]
    fn lagrange_and_duality_on_small_grid() {
        let limits = Limits::default();
        for (p, parts) in [(2u64, vec![1u32, 1]), (2, vec![2, 1]), (2, vec![2, 2]), (3, vec![1, 1])] {
            let g = group(p, &parts);
            let weight = g.group_type().weight();
            let sub_census = subgroup_order_census(&g, &limits).unwrap();
            let coset_census = coset_order_census(&g, &limits).unwrap();
            for r in 0..=weight {
                let index = (p as u128).pow(weight - r);
                assert_eq!(coset_census[r as usize], sub_census[r as usize] * index);
                // Self-duality: as many subgroups of order p^r as of index p^r.
                assert_eq!(sub_census[r as usize], sub_census[(weight - r) as usize]);
            }
        }
    }

    #[test]
    fn coset_representative_is_minimum() {
        let g = group(2, &[2, 1]);
        let h = subgroup_from_generators(&g, &[el(&[2, 1])]).unwrap();
        for c in h.cosets() {
            let members = c.elements();
            assert_eq!(c.representative(), members.iter().min().unwrap());
            assert_eq!(members.len(), 2);
            for m in &members {
                assert!(c.contains(m));
                assert_eq!(&h.coset_of(m), &c);
            }
        }
    }

    #[test]
    fn max_free_rank_examples() {
        let g = group(2, &[2, 2]);
        assert_eq!(max_free_rank(&g, &Subgroup::full(&g), 2).unwrap(), 2);
        let doubled = subgroup_from_generators(&g, &[el(&[2, 0]), el(&[0, 2])]).unwrap();
        assert_eq!(max_free_rank(&g, &doubled, 2).unwrap(), 0);
        let cyclic = subgroup_from_generators(&g, &[el(&[1, 0])]).unwrap();
        assert_eq!(max_free_rank(&g, &cyclic, 2).unwrap(), 1);
        let bad = group(2, &[2, 1]);
        assert!(max_free_rank(&bad, &Subgroup::full(&bad), 2).is_err());
    }

    #[test]
    fn free_rank_order_bound_boundary_case() {
        let g = group(2, &[2, 2]);
        // Vacuous when the free rank exceeds k.
        assert!(free_rank_order_bound(&g, &Subgroup::full(&g), 1).unwrap());
        // Boundary equality: H = 2·G has order 4 = p^{ak+(a−1)(N−k)} exactly,
        // so the strict bound evaluates false. Recorded, not patched.
        let doubled = subgroup_from_generators(&g, &[el(&[2, 0]), el(&[0, 2])]).unwrap();
        assert!(!free_rank_order_bound(&g, &doubled, 0).unwrap());
    }

    #[test]
    fn free_rank_order_bound_exhaustive_z2n() {
        // Elementary abelian ambient: bound reads #H < 2^k·2^0 for k ≥ rank+1.
        let limits = Limits::default();
        for n in 1..=3usize {
            let g = group(2, &[1; 3][..n].to_vec().as_slice());
            let order_total = g.order();
            let mut boundary = 0usize;
            for r in 0..=n as u32 {
                let subs =
                    enumerate_subgroups(&g, &crate::qbinom::prime_power(2, r).unwrap(), &limits)
                        .unwrap();
                for h in subs {
                    for k in 0..=n as u32 {
                        if !free_rank_order_bound(&g, &h, k).unwrap() {
                            boundary += 1;
                        }
                    }
                }
            }
            // For a = 1 the bound is #H < 2^k whenever rank(H) ≤ k: equality
            // cases (rank exactly k) exist, and are counted, not hidden.
            assert!(boundary > 0, "expected boundary cases in Z_2^{n}, order {order_total}");
        }
    }

    #[test]
    fn subgroup_serde_roundtrip() {
        let g = group(2, &[2, 1]);
        let h = subgroup_from_generators(&g, &[el(&[2, 1])]).unwrap();
        let json = serde_json::to_string(&h).unwrap();
        assert!(json.contains("\"generators\""));
        let back: Subgroup = serde_json::from_str(&json).unwrap();
        assert_eq!(back, h);
        let g_json = serde_json::to_string(&g).unwrap();
        assert_eq!(g_json, "{\"p\":2,\"type\":[2,1]}");
    }
}
