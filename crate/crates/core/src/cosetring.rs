//! Signed combinations of coset indicators, at desk scale.
//!
//! A combination `Σᵢ 1_{Aᵢ} − Σⱼ 1_{Bⱼ}` of coset indicators evaluates to an
//! integer at every group element; when it is 0/1-valued it is the indicator
//! of a set `U` in the coset ring. This module validates combinations,
//! materializes `U`, extracts a guaranteed-large coset inside `U` by the
//! constructive refinement procedure, and searches exhaustively for the
//! minimal number of signed cosets representing a given set.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::abelian::{
    enumerate_subgroups, subgroup_from_generators, Coset, Element, GroupSpec, Subgroup,
};
use crate::counting::{count_subgroups, lambda_constant};
use crate::qbinom::ExactCount;
use crate::{Error, Limits, Result};

/// Dense bitset over the elements of one group, indexed by the lexicographic
/// rank of the coordinate vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct ElemSet {
    words: Vec<u64>,
}

impl ElemSet {
    pub fn empty(universe: usize) -> ElemSet {
        ElemSet { words: vec![0; universe.div_ceil(64)] }
    }

    pub fn insert(&mut self, idx: usize) {
        self.words[idx / 64] |= 1 << (idx % 64);
    }

    pub fn contains(&self, idx: usize) -> bool {
        self.words[idx / 64] >> (idx % 64) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn union_with(&mut self, other: &ElemSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn subtract(&mut self, other: &ElemSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
    }

    pub fn intersects(&self, other: &ElemSet) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    /// Some element of `self \ other`, if any.
    pub fn difference_witness(&self, other: &ElemSet) -> Option<usize> {
        for (i, (a, b)) in self.words.iter().zip(&other.words).enumerate() {
            let d = a & !b;
            if d != 0 {
                return Some(i * 64 + d.trailing_zeros() as usize);
            }
        }
        None
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(i * 64 + b)
                }
            })
        })
    }
}

/// Lexicographic rank/unrank between elements and bitset indices.
pub(crate) struct Indexer {
    strides: Vec<u64>,
    pub universe: usize,
}

impl Indexer {
    pub fn new(group: &GroupSpec) -> Indexer {
        let n = group.rank();
        let moduli: Vec<u64> =
            (0..n).map(|i| group.p().pow(group.group_type().part(i))).collect();
        let mut strides = vec![1u64; n];
        for l in (0..n.saturating_sub(1)).rev() {
            strides[l] = strides[l + 1] * moduli[l + 1];
        }
        let universe = moduli.iter().product::<u64>() as usize;
        Indexer { strides, universe }
    }

    pub fn rank(&self, x: &Element) -> usize {
        x.0.iter().zip(&self.strides).map(|(&c, &s)| c * s).sum::<u64>() as usize
    }

    pub fn unrank(&self, mut idx: usize) -> Element {
        let mut coords = vec![0u64; self.strides.len()];
        for l in 0..self.strides.len() {
            coords[l] = idx as u64 / self.strides[l];
            idx %= self.strides[l] as usize;
        }
        Element(coords)
    }

    pub fn coset_set(&self, coset: &Coset) -> ElemSet {
        let mut set = ElemSet::empty(self.universe);
        for x in coset.elements() {
            set.insert(self.rank(&x));
        }
        set
    }
}

/// A formal signed sum of coset indicators in one ambient group.
///
/// JSON form: `{"group":…, "positives":[coset…], "negatives":[coset…]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignedCosetCombination {
    pub group: GroupSpec,
    pub positives: Vec<Coset>,
    pub negatives: Vec<Coset>,
}

impl SignedCosetCombination {
    pub fn new(group: GroupSpec, positives: Vec<Coset>, negatives: Vec<Coset>) -> Result<Self> {
        for c in positives.iter().chain(&negatives) {
            if c.group() != &group {
                return Err(Error::precondition(format!(
                    "coset ambient {:?} differs from combination ambient {group:?}",
                    c.group()
                )));
            }
        }
        Ok(SignedCosetCombination { group, positives, negatives })
    }

    /// `L = max(l₁, l₂)`, the side count that drives `Λ`.
    pub fn side_bound(&self) -> u64 {
        self.positives.len().max(self.negatives.len()) as u64
    }

    /// Pointwise value `#{i : x ∈ Aᵢ} − #{j : x ∈ Bⱼ}`.
    pub fn evaluate(&self, x: &Element) -> Result<i64> {
        self.group.validate_element(x)?;
        let pos = self.positives.iter().filter(|c| c.contains(x)).count() as i64;
        let neg = self.negatives.iter().filter(|c| c.contains(x)).count() as i64;
        Ok(pos - neg)
    }

    fn value_table(&self, indexer: &Indexer) -> Vec<i32> {
        let mut acc = vec![0i32; indexer.universe];
        for c in &self.positives {
            for x in c.elements() {
                acc[indexer.rank(&x)] += 1;
            }
        }
        for c in &self.negatives {
            for x in c.elements() {
                acc[indexer.rank(&x)] -= 1;
            }
        }
        acc
    }

    fn check_cap(&self, limits: &Limits) -> Result<()> {
        match self.group.order_u64() {
            Some(order) if order <= limits.enumeration_cap => Ok(()),
            other => Err(Error::CapExceeded {
                what: "combination ambient order".into(),
                actual: other.map(u128::from).unwrap_or(u128::MAX),
                cap: limits.enumeration_cap as u128,
            }),
        }
    }

    /// True iff the combination evaluates to 0 or 1 everywhere.
    pub fn is_indicator(&self, limits: &Limits) -> Result<bool> {
        self.check_cap(limits)?;
        let indexer = Indexer::new(&self.group);
        Ok(self.value_table(&indexer).iter().all(|&v| v == 0 || v == 1))
    }

    /// The set `U = {x : value(x) = 1}`, ascending; errors when the
    /// combination is not an indicator.
    pub fn materialize(&self, limits: &Limits) -> Result<Vec<Element>> {
        self.check_cap(limits)?;
        let indexer = Indexer::new(&self.group);
        let table = self.value_table(&indexer);
        if let Some((idx, &v)) = table.iter().enumerate().find(|(_, &v)| v != 0 && v != 1) {
            return Err(Error::NotIndicator { element: indexer.unrank(idx).0, value: v as i64 });
        }
        Ok(table
            .iter()
            .enumerate()
            .filter(|(_, &v)| v == 1)
            .map(|(idx, _)| indexer.unrank(idx))
            .collect())
    }
}

/// Extraction result: the coset found inside `U` plus the guarantee ledger.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExtractionOutcome {
    pub coset: Coset,
    pub ledger: ExtractionLedger,
}

/// The numbers behind the size guarantee `#G' ≥ p^{K − ⌈Λ(L,p)⌉}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExtractionLedger {
    /// `#U = p^K`.
    pub k: u32,
    /// `L = max(l₁, l₂)`.
    pub l: u64,
    pub lambda: f64,
    pub lambda_ceil: u64,
    /// `log_p` of the extracted coset size.
    pub size_exp: u32,
    /// `K − ⌈Λ⌉`, possibly negative.
    pub guarantee_exp: i64,
}

fn subgroup_intersection(a: &Subgroup, b: &Subgroup) -> Subgroup {
    let common: Vec<Element> = a.elements().into_iter().filter(|x| b.contains(x)).collect();
    subgroup_from_generators(a.group(), &common).expect("intersection elements are valid")
}

/// Index-p subgroups of `d` containing `floor`, canonical order. These are
/// the preimages of hyperplanes of the elementary quotient `d/(p·d + floor)`.
fn maximal_subgroups_over(d: &Subgroup, floor: &Subgroup) -> Vec<Subgroup> {
    let group = d.group().clone();
    let p = group.p() as i64;
    let mut f_gens: Vec<Element> = d.generators().iter().map(|g| group.scale(p, g)).collect();
    f_gens.extend(floor.generators());
    let f = subgroup_from_generators(&group, &f_gens).expect("valid generators");
    // Greedy F_p-basis of d/F.
    let mut basis: Vec<Element> = Vec::new();
    let mut span = f.clone();
    for x in d.elements() {
        if !span.contains(&x) {
            basis.push(x.clone());
            let mut gens = span.generators();
            gens.push(x);
            span = subgroup_from_generators(&group, &gens).expect("valid generators");
        }
    }
    let t = basis.len();
    if t == 0 {
        return Vec::new();
    }
    // Functionals on F_p^t up to scalar: leading coordinate normalized to 1.
    let mut out = Vec::new();
    let mut phi = vec![0i64; t];
    loop {
        let mut i = t;
        loop {
            if i == 0 {
                break;
            }
            i -= 1;
            phi[i] += 1;
            if phi[i] < p {
                break;
            }
            phi[i] = 0;
        }
        if phi.iter().all(|&c| c == 0) {
            break;
        }
        let lead = phi.iter().position(|&c| c != 0).unwrap();
        if phi[lead] != 1 {
            continue;
        }
        let mut gens = f.generators();
        for (i, &c) in phi.iter().enumerate() {
            if i == lead {
                continue;
            }
            if c == 0 {
                gens.push(basis[i].clone());
            } else {
                gens.push(group.sub(&basis[i], &group.scale(c, &basis[lead])));
            }
        }
        let w = subgroup_from_generators(&group, &gens).expect("valid generators");
        debug_assert_eq!(w.order_exp() + 1, d.order_exp());
        out.push(w);
    }
    out.sort();
    out.dedup();
    out
}

/// Extracts a coset `G' ⊆ U` of size at least `p^{K − ⌈Λ(L,p)⌉}` from an
/// indicator combination with `#U = p^K`.
///
/// Procedure: sort the negative cosets by non-increasing cardinality, start
/// from the positive coset maximizing `#(Aᵢ \ ∪Bⱼ)`, then refine through the
/// negatives. Whenever the current coset `Z` meets the next negative `B`, `Z`
/// splits into `p` translates of a maximal subgroup of its direction
/// containing `dir(Z) ∩ dir(B)`; the translate holding `Z ∩ B` absorbs the
/// intersection, and among the remaining translates one not covered by the
/// union of all negatives is chosen, in canonical order. Failing to find one
/// is reported as an error and logged by callers as a counterexample
/// candidate, never patched over.
pub fn extract_coset(comb: &SignedCosetCombination, limits: &Limits) -> Result<ExtractionOutcome> {
    let u = comb.materialize(limits)?;
    let p = comb.group.p();
    let size = u.len() as u64;
    let mut k = 0u32;
    {
        let mut s = size;
        if s == 0 {
            return Err(Error::NotPrimePower { size, p });
        }
        while s % p == 0 {
            s /= p;
            k += 1;
        }
        if s != 1 {
            return Err(Error::NotPrimePower { size, p });
        }
    }
    if comb.positives.is_empty() {
        return Err(Error::precondition("combination has no positive cosets"));
    }
    let l = comb.side_bound();
    let lambda = lambda_constant(l, p)?;
    let indexer = Indexer::new(&comb.group);

    let mut negatives: Vec<&Coset> = comb.negatives.iter().collect();
    negatives.sort_by(|a, b| b.size_exp().cmp(&a.size_exp()).then_with(|| a.cmp(b)));
    let neg_sets: Vec<ElemSet> = negatives.iter().map(|c| indexer.coset_set(c)).collect();
    let mut union_b = ElemSet::empty(indexer.universe);
    for s in &neg_sets {
        union_b.union_with(s);
    }

    // Start coset: most points outside every negative; ties to the
    // canonically least (positives pre-sorted).
    let mut positives: Vec<&Coset> = comb.positives.iter().collect();
    positives.sort();
    let mut start: Option<(&Coset, usize)> = None;
    for a in positives {
        let mut outside = indexer.coset_set(a);
        outside.subtract(&union_b);
        let count = outside.len();
        if count > start.map_or(0, |(_, c)| c) {
            start = Some((a, count));
        }
    }
    let Some((a1, _)) = start else {
        return Err(Error::ExtractionFailure(
            "every positive coset is covered by the union of negatives".into(),
        ));
    };

    let mut z = a1.clone();
    let mut z_set = indexer.coset_set(&z);
    for (b, b_set) in negatives.iter().zip(&neg_sets) {
        if !z_set.intersects(b_set) {
            continue;
        }
        if z.size_exp() == 0 {
            return Err(Error::ExtractionFailure(
                "refinement reached a single covered point".into(),
            ));
        }
        let meet_point = {
            let idx = z_set.iter().find(|&i| b_set.contains(i)).expect("nonempty intersection");
            indexer.unrank(idx)
        };
        let floor = subgroup_intersection(z.subgroup(), b.subgroup());
        let mut found = None;
        'search: for w in maximal_subgroups_over(z.subgroup(), &floor) {
            let absorbed = w.coset_of(&meet_point);
            let mut translates: Vec<Coset> = z.elements().iter().map(|x| w.coset_of(x)).collect();
            translates.sort();
            translates.dedup();
            for cand in translates {
                if cand == absorbed {
                    continue;
                }
                let cand_set = indexer.coset_set(&cand);
                if cand_set.difference_witness(&union_b).is_some() {
                    found = Some((cand, cand_set));
                    break 'search;
                }
            }
        }
        match found {
            Some((cand, cand_set)) => {
                z = cand;
                z_set = cand_set;
            }
            None => {
                return Err(Error::ExtractionFailure(
                    "no uncovered subcoset among the admissible splittings".into(),
                ));
            }
        }
    }

    debug_assert!(!z_set.intersects(&union_b));
    Ok(ExtractionOutcome {
        ledger: ExtractionLedger {
            k,
            l,
            lambda: lambda.real,
            lambda_ceil: lambda.ceil,
            size_exp: z.size_exp(),
            guarantee_exp: k as i64 - lambda.ceil as i64,
        },
        coset: z,
    })
}

/// True iff the set is a coset: translating its least element to zero must
/// leave exactly the element set of a subgroup.
pub fn is_coset_set(group: &GroupSpec, set: &[Element]) -> bool {
    if set.is_empty() {
        return false;
    }
    let mut sorted: Vec<Element> = set.to_vec();
    sorted.sort();
    sorted.dedup();
    let base = sorted[0].clone();
    let mut translated: Vec<Element> = sorted.iter().map(|x| group.sub(x, &base)).collect();
    translated.sort();
    let span = subgroup_from_generators(group, &translated).expect("valid elements");
    span.elements() == translated
}

/// All cosets of all subgroups of the group, canonical order, with bitsets.
fn coset_universe(group: &GroupSpec, limits: &Limits) -> Result<(Indexer, Vec<(Coset, ElemSet)>)> {
    let indexer = Indexer::new(group);
    let mut out = Vec::new();
    for r in 0..=group.group_type().weight() {
        let order = ExactCount(num_bigint::BigUint::from(group.p()).pow(r));
        for h in enumerate_subgroups(group, &order, limits)? {
            for c in h.cosets() {
                let set = indexer.coset_set(&c);
                out.push((c, set));
            }
        }
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    Ok((indexer, out))
}

/// A minimal signed-coset representation of a set: `(+1, A)` and `(−1, B)`
/// entries whose signed indicator sum is the set's indicator.
pub type SignedRepresentation = Vec<(i8, Coset)>;

/// Minimal signed-coset representation of `1_U`, searched exhaustively by
/// iterative deepening up to `max_l` total cosets; `None` beyond it.
///
/// The search branches on the first element whose running value is wrong:
/// any representation must contain a coset of the needed sign through that
/// element, so trying all of them is exhaustive.
pub fn minimal_representation(
    group: &GroupSpec,
    u: &[Element],
    max_l: u32,
    limits: &Limits,
) -> Result<Option<SignedRepresentation>> {
    match group.order_u64() {
        Some(order) if order <= limits.minrep_cap => {}
        other => {
            return Err(Error::CapExceeded {
                what: "minimal-representation ambient order".into(),
                actual: other.map(u128::from).unwrap_or(u128::MAX),
                cap: limits.minrep_cap as u128,
            })
        }
    }
    for x in u {
        group.validate_element(x)?;
    }
    let enum_limits = Limits { enumeration_cap: limits.minrep_cap, ..limits.clone() };
    let (indexer, universe) = coset_universe(group, &enum_limits)?;
    let mut deficit = vec![0i32; indexer.universe];
    for x in u {
        deficit[indexer.rank(x)] = 1;
    }
    if deficit.iter().all(|&v| v == 0) {
        return Ok(Some(Vec::new()));
    }
    let mut cosets_at: Vec<Vec<usize>> = vec![Vec::new(); indexer.universe];
    for (ci, (_, set)) in universe.iter().enumerate() {
        for idx in set.iter() {
            cosets_at[idx].push(ci);
        }
    }
    let mut chosen: Vec<(i8, usize)> = Vec::new();
    for depth in 1..=max_l {
        if search(&universe, &cosets_at, &mut deficit, depth, &mut chosen) {
            return Ok(Some(
                chosen.into_iter().map(|(s, ci)| (s, universe[ci].0.clone())).collect(),
            ));
        }
    }
    Ok(None)
}

/// Least total number of signed cosets representing `1_U`; see
/// [`minimal_representation`].
pub fn minimal_representation_length(
    group: &GroupSpec,
    u: &[Element],
    max_l: u32,
    limits: &Limits,
) -> Result<Option<u32>> {
    Ok(minimal_representation(group, u, max_l, limits)?.map(|rep| rep.len() as u32))
}

fn search(
    universe: &[(Coset, ElemSet)],
    cosets_at: &[Vec<usize>],
    deficit: &mut [i32],
    budget: u32,
    chosen: &mut Vec<(i8, usize)>,
) -> bool {
    let mut first_wrong = None;
    let mut worst = 0i32;
    for (idx, &d) in deficit.iter().enumerate() {
        if d != 0 && first_wrong.is_none() {
            first_wrong = Some(idx);
        }
        worst = worst.max(d.abs());
    }
    let Some(pivot) = first_wrong else { return true };
    if worst as u32 > budget {
        return false;
    }
    let sign = if deficit[pivot] > 0 { 1i8 } else { -1 };
    for &ci in &cosets_at[pivot] {
        let (_, set) = &universe[ci];
        for idx in set.iter() {
            deficit[idx] -= sign as i32;
        }
        chosen.push((sign, ci));
        let ok = search(universe, cosets_at, deficit, budget - 1, chosen);
        if !ok {
            chosen.pop();
        }
        for idx in set.iter() {
            deficit[idx] += sign as i32;
        }
        if ok {
            return true;
        }
    }
    false
}

/// Draws a random indicator combination in an elementary abelian group.
///
/// Subgroups are uniform over the full subgroup list: the dimension is
/// weighted by the exact per-dimension counts, then a uniform subspace of
/// that dimension is produced from a random full-rank basis. Offsets are
/// uniform. The draw is rejection-sampled until the combination is a 0/1
/// indicator whose support size is a p-power.
pub fn sample_indicator_combination<R: Rng>(
    group: &GroupSpec,
    rng: &mut R,
    max_side: usize,
    limits: &Limits,
) -> Result<SignedCosetCombination> {
    if group.group_type().parts().iter().any(|&a| a != 1) {
        return Err(Error::precondition("sampler needs an elementary abelian group"));
    }
    let n = group.rank() as u32;
    let p = group.p();
    let weights: Vec<u128> = (0..=n)
        .map(|r| {
            count_subgroups(p, group.group_type(), r)
                .expect("prime checked")
                .to_u128()
                .expect("desk-scale count")
        })
        .collect();
    let total: u128 = weights.iter().sum();
    let elements = group.elements();
    loop {
        let l1 = rng.gen_range(1..=max_side);
        let l2 = rng.gen_range(0..=max_side);
        let draw_coset = |rng: &mut R| -> Coset {
            let mut pick = rng.gen_range(0..total);
            let mut dim = 0u32;
            for (r, &w) in weights.iter().enumerate() {
                if pick < w {
                    dim = r as u32;
                    break;
                }
                pick -= w;
            }
            let subgroup = loop {
                let gens: Vec<Element> = (0..dim)
                    .map(|_| Element((0..n).map(|_| rng.gen_range(0..p)).collect()))
                    .collect();
                let h = subgroup_from_generators(group, &gens).expect("valid");
                if h.order_exp() == dim {
                    break h;
                }
            };
            let offset = &elements[rng.gen_range(0..elements.len())];
            subgroup.coset_of(offset)
        };
        let positives: Vec<Coset> = (0..l1).map(|_| draw_coset(rng)).collect();
        let negatives: Vec<Coset> = (0..l2).map(|_| draw_coset(rng)).collect();
        let comb = SignedCosetCombination::new(group.clone(), positives, negatives)?;
        if !comb.is_indicator(limits)? {
            continue;
        }
        let size = comb.materialize(limits)?.len() as u64;
        if size == 0 {
            continue;
        }
        let mut s = size;
        while s % p == 0 {
            s /= p;
        }
        if s == 1 {
            return Ok(comb);
        }
    }
}
