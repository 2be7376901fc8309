//! Characters, Fourier-algebra norms, and distortion witnesses.
//!
//! The dual of `⊕ Z_{p^{αᵢ}}` is isomorphic to the group itself, so dual
//! indices are plain [`Element`]s. The algebra norm of a coefficient vector
//! `a` is the mean absolute value of `Σ_χ a_χ·χ(g)` over the group — dense
//! evaluation with compensated summation, no FFT, capped at desk scale.
//! Coset indicators have norm exactly 1, which is what makes them the
//! canonical witness family for norm distortion under character injections.

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::abelian::{enumerate_subgroups, Element, GroupSpec};
use crate::cosetring::{is_coset_set, minimal_representation};
use crate::qbinom::ExactCount;
use crate::{Error, Limits, Result};

/// A finitely supported coefficient vector on the dual group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientVector {
    pub group: GroupSpec,
    /// Dual index → complex coefficient, serialized as `[re, im]` pairs.
    #[serde(with = "coeff_serde")]
    pub coeffs: BTreeMap<Element, Complex64>,
}

mod coeff_serde {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(
        map: &BTreeMap<Element, Complex64>,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<(&Element, [f64; 2])> = map.iter().map(|(k, v)| (k, [v.re, v.im])).collect();
        serde::Serialize::serialize(&rows, s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<BTreeMap<Element, Complex64>, D::Error> {
        let rows: Vec<(Element, [f64; 2])> = serde::Deserialize::deserialize(d)?;
        Ok(rows.into_iter().map(|(k, [re, im])| (k, Complex64::new(re, im))).collect())
    }
}

impl CoefficientVector {
    pub fn new(group: GroupSpec, coeffs: BTreeMap<Element, Complex64>) -> Result<Self> {
        for chi in coeffs.keys() {
            group.validate_element(chi)?;
        }
        Ok(CoefficientVector { group, coeffs })
    }

    /// 0/1 indicator of a set of dual indices.
    pub fn indicator(group: GroupSpec, support: impl IntoIterator<Item = Element>) -> Result<Self> {
        let coeffs = support.into_iter().map(|chi| (chi, Complex64::new(1.0, 0.0))).collect();
        CoefficientVector::new(group, coeffs)
    }

    pub fn support(&self) -> impl Iterator<Item = &Element> {
        self.coeffs.keys()
    }
}

/// An injection between dual groups, as an explicit table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "InjectionTableJson", into = "InjectionTableJson")]
pub struct InjectionTable {
    source: GroupSpec,
    target: GroupSpec,
    map: BTreeMap<Element, Element>,
}

#[derive(Serialize, Deserialize)]
struct InjectionTableJson {
    source: GroupSpec,
    target: GroupSpec,
    map: Vec<(Element, Element)>,
}

impl TryFrom<InjectionTableJson> for InjectionTable {
    type Error = Error;
    fn try_from(j: InjectionTableJson) -> Result<Self> {
        InjectionTable::new(j.source, j.target, j.map)
    }
}

impl From<InjectionTable> for InjectionTableJson {
    fn from(t: InjectionTable) -> InjectionTableJson {
        InjectionTableJson { source: t.source, target: t.target, map: t.map.into_iter().collect() }
    }
}

impl InjectionTable {
    pub fn new(source: GroupSpec, target: GroupSpec, map: Vec<(Element, Element)>) -> Result<Self> {
        let mut table = BTreeMap::new();
        let mut images = BTreeSet::new();
        for (from, to) in map {
            source.validate_element(&from)?;
            target.validate_element(&to)?;
            if !images.insert(to.clone()) {
                return Err(Error::precondition(format!("injection table repeats image {to:?}")));
            }
            if table.insert(from.clone(), to).is_some() {
                return Err(Error::precondition(format!(
                    "injection table repeats source index {from:?}"
                )));
            }
        }
        Ok(InjectionTable { source, target, map: table })
    }

    /// The identity table on the full dual of `group`.
    pub fn identity(group: &GroupSpec) -> Self {
        let map = group.elements().into_iter().map(|x| (x.clone(), x)).collect();
        InjectionTable { source: group.clone(), target: group.clone(), map }
    }

    pub fn source(&self) -> &GroupSpec {
        &self.source
    }

    pub fn target(&self) -> &GroupSpec {
        &self.target
    }

    pub fn image_of(&self, chi: &Element) -> Option<&Element> {
        self.map.get(chi)
    }
}

/// Root-of-unity table: `roots[k] = e^{2πik/m}` for the exponent `m = p^A`.
struct RootTable {
    roots: Vec<Complex64>,
    exponent: u64,
    /// `scale[l] = m/p^{α_l}` lifts coordinate phases to the common denominator.
    scale: Vec<u64>,
    moduli: Vec<u64>,
}

impl RootTable {
    fn new(group: &GroupSpec) -> RootTable {
        let p = group.p();
        let a_max = group.group_type().part(0);
        let exponent = p.pow(a_max);
        let roots = (0..exponent)
            .map(|k| {
                let theta = 2.0 * std::f64::consts::PI * (k as f64) / (exponent as f64);
                Complex64::new(theta.cos(), theta.sin())
            })
            .collect();
        let moduli: Vec<u64> =
            (0..group.rank()).map(|l| p.pow(group.group_type().part(l))).collect();
        let scale = moduli.iter().map(|&m| exponent / m).collect();
        RootTable { roots, exponent, scale, moduli }
    }

    /// `χ(g) = e^{2πi·Σ_l χ_l·g_l/p^{α_l}}`, the phase accumulated as an
    /// exact integer over the common denominator.
    fn value(&self, chi: &Element, g: &Element) -> Complex64 {
        let mut phase = 0u64;
        for l in 0..self.scale.len() {
            phase = (phase + (chi.0[l] * g.0[l]) % self.moduli[l] * self.scale[l]) % self.exponent;
        }
        self.roots[phase as usize]
    }
}

/// The character value `χ(g)`; always on the unit circle.
pub fn character_value(group: &GroupSpec, chi: &Element, g: &Element) -> Result<Complex64> {
    group.validate_element(chi)?;
    group.validate_element(g)?;
    Ok(RootTable::new(group).value(chi, g))
}

/// Compensated (Kahan) accumulator.
#[derive(Default, Clone, Copy)]
struct Kahan {
    sum: f64,
    carry: f64,
}

impl Kahan {
    fn add(&mut self, x: f64) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }
}

fn check_norm_cap(group: &GroupSpec, limits: &Limits) -> Result<u64> {
    match group.order_u64() {
        Some(order) if order <= limits.enumeration_cap => Ok(order),
        other => Err(Error::CapExceeded {
            what: "group order for norm evaluation".into(),
            actual: other.map(u128::from).unwrap_or(u128::MAX),
            cap: limits.enumeration_cap as u128,
        }),
    }
}

/// The algebra norm `(1/#G)·Σ_{g∈G} |Σ_χ a_χ·χ(g)|`.
pub fn a_norm(v: &CoefficientVector, limits: &Limits) -> Result<f64> {
    let order = check_norm_cap(&v.group, limits)?;
    let table = RootTable::new(&v.group);
    let mut total = Kahan::default();
    for g in v.group.elements() {
        let mut re = Kahan::default();
        let mut im = Kahan::default();
        for (chi, a) in &v.coeffs {
            let w = table.value(chi, &g) * a;
            re.add(w.re);
            im.add(w.im);
        }
        total.add(Complex64::new(re.sum, im.sum).norm());
    }
    Ok(total.sum / order as f64)
}

/// Transport of coefficients along the injection: `a_χ` moves to `a_{σ(χ)}`.
pub fn pushforward(sigma: &InjectionTable, v: &CoefficientVector) -> Result<CoefficientVector> {
    if v.group != *sigma.source() {
        return Err(Error::precondition("coefficient vector not on the injection's source"));
    }
    let mut coeffs = BTreeMap::new();
    for (chi, a) in &v.coeffs {
        let Some(image) = sigma.image_of(chi) else {
            return Err(Error::precondition(format!(
                "support index {chi:?} outside the injection's domain"
            )));
        };
        coeffs.insert(image.clone(), *a);
    }
    CoefficientVector::new(sigma.target().clone(), coeffs)
}

/// One witness row of a distortion report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WitnessRatio {
    pub source_norm: f64,
    pub image_norm: f64,
    /// `ρ = ‖T v‖/‖v‖`.
    pub ratio: f64,
}

/// Lower-bound report for the distortion `‖T‖·‖T⁻¹‖` of an injection,
/// restricted to a witness family.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WitnessReport {
    pub witnesses: Vec<WitnessRatio>,
    /// `(max_v ρ)·(max_v 1/ρ)` — a valid lower bound on `‖T‖·‖T⁻¹‖`.
    pub distortion_lower_bound: f64,
}

/// Evaluates the witness family under the injection and reports the
/// distortion lower bound `(max ρ)·(max 1/ρ)`.
pub fn distortion_witness(
    sigma: &InjectionTable,
    witnesses: &[CoefficientVector],
    limits: &Limits,
) -> Result<WitnessReport> {
    if witnesses.is_empty() {
        return Err(Error::precondition("empty witness family"));
    }
    let mut rows = Vec::with_capacity(witnesses.len());
    let mut max_ratio = f64::MIN;
    let mut max_inverse = f64::MIN;
    for v in witnesses {
        let source_norm = a_norm(v, limits)?;
        if source_norm == 0.0 {
            return Err(Error::ZeroNormWitness);
        }
        let image_norm = a_norm(&pushforward(sigma, v)?, limits)?;
        let ratio = image_norm / source_norm;
        max_ratio = max_ratio.max(ratio);
        max_inverse = max_inverse.max(1.0 / ratio);
        rows.push(WitnessRatio { source_norm, image_norm, ratio });
    }
    Ok(WitnessReport { witnesses: rows, distortion_lower_bound: max_ratio * max_inverse })
}

/// The canonical witness family: indicators of all cosets of all subgroups
/// of the dual, deduplicated by support, in canonical order.
pub fn default_witnesses(group: &GroupSpec, limits: &Limits) -> Result<Vec<CoefficientVector>> {
    check_norm_cap(group, limits)?;
    let mut supports: BTreeSet<Vec<Element>> = BTreeSet::new();
    for r in 0..=group.group_type().weight() {
        let order = ExactCount(num_bigint::BigUint::from(group.p()).pow(r));
        for h in enumerate_subgroups(group, &order, limits)? {
            for c in h.cosets() {
                supports.insert(c.elements());
            }
        }
    }
    supports.into_iter().map(|s| CoefficientVector::indicator(group.clone(), s)).collect()
}

/// One row of the exhaustive dual-subset survey.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SurveyRow {
    /// Bit `i` set ⇔ the i-th dual element (ascending order) is in the subset.
    pub subset_bitmask: u64,
    pub norm: f64,
    pub is_coset: bool,
    /// Minimal signed-coset representation length, up to the given cap.
    pub min_coset_length: Option<u32>,
    /// Distinct direction subgroups in the minimal representation found
    /// (descriptive: minimality is by total coset count).
    pub distinct_subgroups: Option<u32>,
}

/// Exhaustive survey over every nonempty subset of the dual group: algebra
/// norm, cosetness, and minimal representation length. Rows are filtered to
/// `norm ≤ norm_cap` and ordered by ascending bitmask.
pub fn idempotent_survey(
    group: &GroupSpec,
    norm_cap: f64,
    max_l: u32,
    limits: &Limits,
) -> Result<Vec<SurveyRow>> {
    let order = match group.order_u64() {
        Some(order) if order <= limits.survey_cap => order,
        other => {
            return Err(Error::CapExceeded {
                what: "group order for subset survey".into(),
                actual: other.map(u128::from).unwrap_or(u128::MAX),
                cap: limits.survey_cap as u128,
            })
        }
    };
    let norms = subset_norms(group);
    let dual_elements = group.elements();
    let mut rows = Vec::new();
    for mask in 1u64..(1u64 << order) {
        let norm = norms[mask as usize];
        if norm > norm_cap {
            continue;
        }
        let support: Vec<Element> = (0..order)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| dual_elements[i as usize].clone())
            .collect();
        let rep = minimal_representation(group, &support, max_l, limits)?;
        let (min_coset_length, distinct_subgroups) = match &rep {
            Some(rep) => {
                let distinct: BTreeSet<_> = rep.iter().map(|(_, c)| c.subgroup().clone()).collect();
                (Some(rep.len() as u32), Some(distinct.len() as u32))
            }
            None => (None, None),
        };
        rows.push(SurveyRow {
            subset_bitmask: mask,
            norm,
            is_coset: is_coset_set(group, &support),
            min_coset_length,
            distinct_subgroups,
        });
    }
    Ok(rows)
}

/// Algebra norms of every 0/1 subset of the dual, indexed by bitmask.
///
/// Walks subsets in Gray-code order so each step updates the transform by a
/// single character. Shared by the survey and the exhaustive norm checks.
pub fn subset_norms(group: &GroupSpec) -> Vec<f64> {
    let order = group.order_u64().expect("survey-scale group") as usize;
    let table = RootTable::new(group);
    let elements = group.elements();
    // transform[g] = Σ_{χ∈S} χ(g) for the current Gray-code subset S.
    let mut transform = vec![Complex64::new(0.0, 0.0); order];
    let mut norms = vec![0.0f64; 1 << order];
    let mut prev_gray = 0u64;
    for k in 1u64..(1u64 << order) {
        let gray = k ^ (k >> 1);
        let flipped = (gray ^ prev_gray).trailing_zeros() as usize;
        let sign = if gray >> flipped & 1 == 1 { 1.0 } else { -1.0 };
        let chi = &elements[flipped];
        for (g, t) in elements.iter().zip(transform.iter_mut()) {
            *t += table.value(chi, g) * sign;
        }
        let mut total = Kahan::default();
        for t in &transform {
            total.add(t.norm());
        }
        norms[gray as usize] = total.sum / order as f64;
        prev_gray = gray;
    }
    norms
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::Partition;

    fn group(p: u64, parts: &[u32]) -> GroupSpec {
        GroupSpec::new(p, Partition::new(parts.to_vec()).unwrap()).unwrap()
    }

    fn el(coords: &[u64]) -> Element {
        Element(coords.to_vec())
    }

    const TOL: f64 = 1e-12;

    #[test]
    fn character_examples() {
        let z4 = group(2, &[2]);
        for g in z4.elements() {
            let v = character_value(&z4, &el(&[0]), &g).unwrap();
            assert!((v - Complex64::new(1.0, 0.0)).norm() < TOL);
        }
        let z2 = group(2, &[1]);
        let v = character_value(&z2, &el(&[1]), &el(&[1])).unwrap();
        assert!((v - Complex64::new(-1.0, 0.0)).norm() < TOL);
        let i = character_value(&z4, &el(&[1]), &el(&[1])).unwrap();
        assert!((i - Complex64::new(0.0, 1.0)).norm() < TOL);
        assert!(character_value(&z4, &el(&[4]), &el(&[0])).is_err());
    }

    #[test]
    fn norm_examples() {
        let limits = Limits::default();
        let z4 = group(2, &[2]);
        // A single character has norm 1.
        let single = CoefficientVector::indicator(z4.clone(), [el(&[3])]).unwrap();
        assert!((a_norm(&single, &limits).unwrap() - 1.0).abs() < TOL);

        // S = {0,1} in the dual of Z_4: (2 + 2√2)/4.
        let pair = CoefficientVector::indicator(z4.clone(), [el(&[0]), el(&[1])]).unwrap();
        let expect = (2.0 + 2.0 * 2.0f64.sqrt()) / 4.0;
        assert!((a_norm(&pair, &limits).unwrap() - expect).abs() < 1e-9);

        // Coset indicators have norm 1 (spot check; exhaustive in the
        // acceptance suite).
        for w in default_witnesses(&group(2, &[2, 1]), &limits).unwrap() {
            assert!((a_norm(&w, &limits).unwrap() - 1.0).abs() < TOL);
        }
    }

    #[test]
    fn norm_is_homogeneous_and_subadditive() {
        let limits = Limits::default();
        let g = group(3, &[1, 1]);
        let v = CoefficientVector::indicator(g.clone(), [el(&[0, 0]), el(&[1, 2]), el(&[2, 1])])
            .unwrap();
        let base = a_norm(&v, &limits).unwrap();
        let scaled = CoefficientVector::new(
            g.clone(),
            v.coeffs.iter().map(|(k, a)| (k.clone(), a * 2.5)).collect(),
        )
        .unwrap();
        assert!((a_norm(&scaled, &limits).unwrap() - 2.5 * base).abs() < 1e-9);

        let w = CoefficientVector::indicator(g.clone(), [el(&[0, 1])]).unwrap();
        let mut sum = v.coeffs.clone();
        for (k, a) in &w.coeffs {
            *sum.entry(k.clone()).or_insert(Complex64::new(0.0, 0.0)) += a;
        }
        let vw = CoefficientVector::new(g.clone(), sum).unwrap();
        assert!(a_norm(&vw, &limits).unwrap() <= base + a_norm(&w, &limits).unwrap() + 1e-9);
    }

    #[test]
    fn pushforward_examples() {
        let z4 = group(2, &[2]);
        let v = CoefficientVector::indicator(z4.clone(), [el(&[0]), el(&[2])]).unwrap();
        let id = InjectionTable::identity(&z4);
        assert_eq!(pushforward(&id, &v).unwrap(), v);

        let empty = CoefficientVector::new(z4.clone(), BTreeMap::new()).unwrap();
        assert_eq!(pushforward(&id, &empty).unwrap().coeffs.len(), 0);

        // Support size preserved, coefficients relocated.
        let z22 = group(2, &[1, 1]);
        let sigma = InjectionTable::new(
            z4.clone(),
            z22.clone(),
            vec![
                (el(&[0]), el(&[0, 0])),
                (el(&[1]), el(&[0, 1])),
                (el(&[2]), el(&[1, 0])),
                (el(&[3]), el(&[1, 1])),
            ],
        )
        .unwrap();
        let image = pushforward(&sigma, &v).unwrap();
        assert_eq!(image.coeffs.len(), 2);
        assert!(image.coeffs.contains_key(&el(&[0, 0])));
        assert!(image.coeffs.contains_key(&el(&[1, 0])));

        // Support outside the domain is rejected.
        let partial = InjectionTable::new(z4.clone(), z22, vec![(el(&[0]), el(&[0, 0]))]).unwrap();
        assert!(pushforward(&partial, &v).is_err());
    }

    #[test]
    fn injection_validation() {
        let z4 = group(2, &[2]);
        let z22 = group(2, &[1, 1]);
        assert!(InjectionTable::new(
            z4.clone(),
            z22.clone(),
            vec![(el(&[0]), el(&[0, 0])), (el(&[1]), el(&[0, 0]))],
        )
        .is_err());
    }

    #[test]
    fn identity_injection_gives_bound_one() {
        let limits = Limits::default();
        let g = group(2, &[1, 1]);
        let id = InjectionTable::identity(&g);
        let witnesses = default_witnesses(&g, &limits).unwrap();
        let report = distortion_witness(&id, &witnesses, &limits).unwrap();
        for row in &report.witnesses {
            assert!((row.ratio - 1.0).abs() < TOL);
        }
        assert!((report.distortion_lower_bound - 1.0).abs() < TOL);
    }

    #[test]
    fn default_witness_counts() {
        let limits = Limits::default();
        // Z_2: the two singleton cosets and the whole dual.
        assert_eq!(default_witnesses(&group(2, &[1]), &limits).unwrap().len(), 3);
        let trivial = GroupSpec::new(2, Partition::zero()).unwrap();
        assert_eq!(default_witnesses(&trivial, &limits).unwrap().len(), 1);
        // Z_2×Z_2: 1 whole + 6 two-element cosets + 4 singletons.
        assert_eq!(default_witnesses(&group(2, &[1, 1]), &limits).unwrap().len(), 11);
    }

    #[test]
    fn survey_rows_for_z4() {
        let limits = Limits::default();
        let z4 = group(2, &[2]);
        let rows = idempotent_survey(&z4, f64::INFINITY, 3, &limits).unwrap();
        assert_eq!(rows.len(), 15);
        for row in &rows {
            assert!(row.norm >= 1.0 - TOL);
            assert_eq!(row.is_coset, row.min_coset_length == Some(1));
            if row.is_coset {
                assert!((row.norm - 1.0).abs() < TOL);
            }
        }
        // {0,1} has norm (2+2√2)/4 and representation length 2.
        let pair = rows.iter().find(|r| r.subset_bitmask == 0b11).unwrap();
        assert!((pair.norm - (2.0 + 2.0 * 2.0f64.sqrt()) / 4.0).abs() < 1e-9);
        assert_eq!(pair.min_coset_length, Some(2));
        // Norm cap filters rows.
        let capped = idempotent_survey(&z4, 1.1, 3, &limits).unwrap();
        assert!(capped.len() < rows.len());
        assert!(capped.iter().all(|r| r.norm <= 1.1));
    }

    fn permutations(n: usize) -> Vec<Vec<usize>> {
        if n == 1 {
            return vec![vec![0]];
        }
        let mut out = Vec::new();
        for perm in permutations(n - 1) {
            for pos in 0..n {
                let mut next = perm.clone();
                next.insert(pos, n - 1);
                out.push(next);
            }
        }
        out
    }

    #[test]
    fn bijection_distortion_between_z4_and_z2z2() {
        // Exhaustive over all 24 bijections between the four-element duals.
        // Coset-indicator witnesses cannot separate the two groups at this
        // size: every 2-subset of Z_2×Z_2 is itself a coset, so every ratio
        // is 1 and the minimum bound is exactly 1. The full subset family
        // does separate them: the non-coset pair {0,1} of the Z_4 dual has
        // norm (2+2√2)/4 while all its images have norm 1, so the minimum
        // bound over bijections is exactly (2+2√2)/4.
        let limits = Limits::default();
        let z4 = group(2, &[2]);
        let z22 = group(2, &[1, 1]);
        let src = z4.elements();
        let tgt = z22.elements();
        let coset_family = default_witnesses(&z4, &limits).unwrap();
        assert_eq!(coset_family.len(), 7);
        let subset_family: Vec<CoefficientVector> = (1u32..16)
            .map(|mask| {
                CoefficientVector::indicator(
                    z4.clone(),
                    (0..4).filter(|i| mask >> i & 1 == 1).map(|i| src[i].clone()),
                )
                .unwrap()
            })
            .collect();
        let mut min_coset = f64::INFINITY;
        let mut min_subset = f64::INFINITY;
        for perm in permutations(4) {
            let map: Vec<(Element, Element)> =
                (0..4).map(|i| (src[i].clone(), tgt[perm[i]].clone())).collect();
            let sigma = InjectionTable::new(z4.clone(), z22.clone(), map).unwrap();
            let rc = distortion_witness(&sigma, &coset_family, &limits).unwrap();
            min_coset = min_coset.min(rc.distortion_lower_bound);
            let rs = distortion_witness(&sigma, &subset_family, &limits).unwrap();
            min_subset = min_subset.min(rs.distortion_lower_bound);
        }
        assert!((min_coset - 1.0).abs() < TOL);
        let expect = (2.0 + 2.0 * 2.0f64.sqrt()) / 4.0;
        assert!((min_subset - expect).abs() < 1e-9, "{min_subset} vs {expect}");
    }

    #[test]
    fn affine_coset_to_coset_map_has_ratio_one() {
        // A map carrying a coset of the source dual onto a coset of the
        // target dual leaves that coset's indicator at ratio 1: both norms
        // are 1 by the coset-indicator norm fact.
        let limits = Limits::default();
        let z4 = group(2, &[2]);
        let z22 = group(2, &[1, 1]);
        let sigma = InjectionTable::new(
            z4.clone(),
            z22,
            vec![(el(&[0]), el(&[0, 0])), (el(&[2]), el(&[1, 0]))],
        )
        .unwrap();
        let witness = CoefficientVector::indicator(z4, [el(&[0]), el(&[2])]).unwrap();
        let report = distortion_witness(&sigma, &[witness], &limits).unwrap();
        assert!((report.witnesses[0].ratio - 1.0).abs() < TOL);
        assert!((report.distortion_lower_bound - 1.0).abs() < TOL);
    }

    #[test]
    fn norm_invariant_under_dual_automorphism_and_translation() {
        // σ(χ) = A(χ) + t for an automorphism A of the dual and a shift t
        // is an isometry of the algebra norm.
        let limits = Limits::default();
        let z4 = group(2, &[2]);
        // χ ↦ 3χ + 1 on Z_4.
        let sigma = InjectionTable::new(
            z4.clone(),
            z4.clone(),
            (0..4u64).map(|chi| (el(&[chi]), el(&[(3 * chi + 1) % 4]))).collect(),
        )
        .unwrap();
        let vectors = [
            CoefficientVector::indicator(z4.clone(), [el(&[0]), el(&[1])]).unwrap(),
            CoefficientVector::indicator(z4.clone(), [el(&[0]), el(&[1]), el(&[3])]).unwrap(),
            CoefficientVector::new(
                z4.clone(),
                [
                    (el(&[0]), Complex64::new(1.0, -0.5)),
                    (el(&[2]), Complex64::new(0.25, 2.0)),
                    (el(&[3]), Complex64::new(-1.5, 0.0)),
                ]
                .into_iter()
                .collect(),
            )
            .unwrap(),
        ];
        for v in &vectors {
            let before = a_norm(v, &limits).unwrap();
            let after = a_norm(&pushforward(&sigma, v).unwrap(), &limits).unwrap();
            assert!((before - after).abs() < 1e-12, "{before} vs {after}");
        }

        // Z_2×Z_2 with the shear (χ₁,χ₂) ↦ (χ₁, χ₁+χ₂) plus a shift.
        let z22 = group(2, &[1, 1]);
        let sigma2 = InjectionTable::new(
            z22.clone(),
            z22.clone(),
            z22.elements()
                .into_iter()
                .map(|chi| {
                    let image = el(&[chi.0[0], (chi.0[0] + chi.0[1] + 1) % 2]);
                    (chi, image)
                })
                .collect(),
        )
        .unwrap();
        let v = CoefficientVector::indicator(z22, [el(&[0, 0]), el(&[1, 0]), el(&[1, 1])]).unwrap();
        let before = a_norm(&v, &limits).unwrap();
        let after = a_norm(&pushforward(&sigma2, &v).unwrap(), &limits).unwrap();
        assert!((before - after).abs() < 1e-12);
    }

    #[test]
    fn subset_norms_match_direct_evaluation() {
        let limits = Limits::default();
        for (p, parts) in [(2u64, vec![2u32]), (2, vec![1, 1]), (3, vec![1])] {
            let g = group(p, &parts);
            let norms = subset_norms(&g);
            let elements = g.elements();
            for mask in 1..norms.len() {
                let support: Vec<Element> = (0..elements.len())
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| elements[i].clone())
                    .collect();
                let v = CoefficientVector::indicator(g.clone(), support).unwrap();
                let direct = a_norm(&v, &limits).unwrap();
                assert!(
                    (norms[mask] - direct).abs() < 1e-10,
                    "p={p} parts={parts:?} mask={mask:#b}: {} vs {direct}",
                    norms[mask]
                );
            }
        }
    }
}
