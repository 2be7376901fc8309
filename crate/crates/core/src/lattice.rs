//! Hermite-normal-form lattice machinery behind the group model.
//!
//! A subgroup `H` of `G = ⊕_l Z_{p^{α_l}}` is identified with the full-rank
//! integer lattice `Λ = π⁻¹(H)` squeezed between `M·Z^n` and `Z^n`, where
//! `π: Z^n → G` is coordinatewise reduction and `M = diag(p^{α_l})`. Every
//! such lattice has a unique upper-triangular Hermite basis whose pivots are
//! p-powers dividing the column moduli and whose above-pivot entries are
//! reduced modulo the pivot of their column. That basis is the canonical form
//! used for subgroup equality, ordering, membership, coset representatives,
//! and exhaustive enumeration.
//!
//! The enumeration recursion builds Hermite matrices column by column from
//! the right. At each level the already-placed rows span a valid lattice for
//! the suffix group, and the admissible new rows `(p^δ, x)` are exactly those
//! with `p^{α_c−δ}·x ∈ Λ_suffix`, i.e. `x` ranges over the `p^{α_c−δ}`-torsion
//! of the suffix quotient. Each subgroup is therefore constructed exactly
//! once, which makes the scan a brute-force census usable as an oracle
//! against closed-form counts.

use crate::partition::Partition;

/// Column moduli context for one group: prime `p` and exponents `α_l`.
#[derive(Debug, Clone)]
pub(crate) struct Ctx {
    pub p: i64,
    pub alpha: Vec<u32>,
    /// `m[l] = p^{α_l}`
    pub m: Vec<i64>,
    pub a_max: u32,
    /// `pp[k] = p^k` for `k ≤ a_max`
    pub pp: Vec<i64>,
}

impl Ctx {
    pub fn new(p: u64, alpha: &Partition) -> Ctx {
        let p = p as i64;
        let alpha: Vec<u32> = alpha.parts().to_vec();
        let a_max = alpha.first().copied().unwrap_or(0);
        let pp: Vec<i64> = (0..=a_max).map(|k| p.pow(k)).collect();
        let m: Vec<i64> = alpha.iter().map(|&a| p.pow(a)).collect();
        Ctx { p, alpha, m, a_max, pp }
    }

    pub fn n(&self) -> usize {
        self.alpha.len()
    }

    pub fn weight(&self) -> u32 {
        self.alpha.iter().sum()
    }
}

fn p_val(mut x: i64, p: i64) -> u32 {
    debug_assert!(x != 0);
    let mut v = 0;
    x = x.abs();
    while x % p == 0 {
        x /= p;
        v += 1;
    }
    v
}

/// Inverse of `u` modulo `modulus` (coprime inputs).
fn inv_mod(u: i64, modulus: i64) -> i64 {
    let (mut r0, mut r1) = (modulus, u.rem_euclid(modulus));
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    debug_assert_eq!(r0, 1, "inv_mod of non-unit");
    t0.rem_euclid(modulus)
}

/// Canonical Hermite basis of a lattice `M·Z^n ⊆ Λ ⊆ Z^n`.
///
/// Row `l` has its pivot `p^{pivot_exp[l]}` at column `l`, zeros to the left,
/// and entries at column `t > l` reduced into `[0, p^{pivot_exp[t]})`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct Hnf {
    pub n: usize,
    /// Row-major `n × n`.
    pub rows: Vec<i64>,
    pub pivot_exp: Vec<u32>,
}

impl Hnf {
    /// The lattice `M·Z^n` itself (the trivial subgroup).
    pub fn m_lattice(ctx: &Ctx) -> Hnf {
        let n = ctx.n();
        let mut rows = vec![0i64; n * n];
        for l in 0..n {
            rows[l * n + l] = ctx.m[l];
        }
        Hnf { n, rows, pivot_exp: ctx.alpha.clone() }
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[i64] {
        &self.rows[i * self.n..(i + 1) * self.n]
    }

    /// Exponent of the subgroup order: `#π(Λ) = p^{Σ(α_l − δ_l)}`.
    pub fn order_exp(&self, ctx: &Ctx) -> u32 {
        (0..self.n).map(|l| ctx.alpha[l] - self.pivot_exp[l]).sum()
    }

    /// Exponent of the index `[G : π(Λ)] = p^{Σ δ_l}`.
    pub fn index_exp(&self) -> u32 {
        self.pivot_exp.iter().sum()
    }

    fn copy_from(&mut self, src: &Hnf) {
        self.n = src.n;
        self.rows.copy_from_slice(&src.rows);
        self.pivot_exp.copy_from_slice(&src.pivot_exp);
    }

    /// Adds the vector `v` (consumed as scratch) to the lattice, restoring the
    /// canonical form. Only columns `start..n` participate; `v` must vanish
    /// before `start`.
    pub fn insert(&mut self, ctx: &Ctx, v: &mut [i64], start: usize) {
        let n = self.n;
        let p = ctx.p;
        for l in start..n {
            v[l] = v[l].rem_euclid(ctx.m[l]);
        }
        let mut changed = false;
        let mut l = start;
        while l < n {
            if v[l] == 0 {
                l += 1;
                continue;
            }
            let a = p_val(v[l], p);
            let dl = self.pivot_exp[l];
            if a >= dl {
                let q = v[l] / ctx.pp[dl as usize];
                let row = l * n;
                for t in l..n {
                    v[t] -= q * self.rows[row + t];
                }
                debug_assert_eq!(v[l], 0);
                l += 1;
            } else {
                // Smaller valuation: v becomes the new pivot row. Scale by the
                // inverse of its unit part (legal because the lattice contains
                // p^{a_max}·Z^n) so the pivot is exactly p^a.
                let pa = ctx.pp[a as usize];
                let u = (v[l] / pa).rem_euclid(ctx.pp[ctx.a_max as usize]);
                let w = inv_mod(u, ctx.pp[ctx.a_max as usize]);
                for t in l..n {
                    v[t] = (v[t] * w).rem_euclid(ctx.m[t]);
                }
                debug_assert_eq!(v[l], pa);
                let row = l * n;
                for t in l..n {
                    std::mem::swap(&mut v[t], &mut self.rows[row + t]);
                }
                self.pivot_exp[l] = a;
                changed = true;
                // keep reducing the displaced old row; it still has valuation
                // ≥ a at column l, so the next pass zeroes it
            }
        }
        if changed {
            // Re-reduce the entries above every pivot.
            for t in start + 1..n {
                let pt = ctx.pp[self.pivot_exp[t] as usize];
                let trow = t * n;
                for i in start..t {
                    let irow = i * n;
                    let q = self.rows[irow + t].div_euclid(pt);
                    if q != 0 {
                        for s in t..n {
                            self.rows[irow + s] -= q * self.rows[trow + s];
                        }
                    }
                }
            }
        }
    }

    /// Reduces `v` into the fundamental box `∏_l [0, p^{pivot_exp[l]})`.
    /// The result is the canonical representative of `v + Λ`, and it is the
    /// lexicographically least element of that coset.
    pub fn box_reduce(&self, ctx: &Ctx, v: &mut [i64], start: usize) {
        let n = self.n;
        for l in start..n {
            let q = v[l].div_euclid(ctx.pp[self.pivot_exp[l] as usize]);
            if q != 0 {
                let row = l * n;
                for t in l..n {
                    v[t] -= q * self.rows[row + t];
                }
            }
        }
    }

    /// Lattice membership via box reduction.
    pub fn contains(&self, ctx: &Ctx, v: &[i64], start: usize) -> bool {
        let mut w = v.to_vec();
        self.box_reduce(ctx, &mut w, start);
        w[start..].iter().all(|&x| x == 0)
    }

    /// The division lattice `(Λ : p^e) = {x : p^e·x ∈ Λ}` on columns
    /// `start..n`.
    ///
    /// Computed as `p^{−e}(Λ ∩ p^e·Z^m)`: the coefficient vectors `c` with
    /// `c·B ≡ 0 (mod p^e)` form a module found by triangular elimination over
    /// `Z/p^e`, and their integer lifts times `B` are exactly divisible by
    /// `p^e`.
    pub fn divide_p_pow(&self, ctx: &Ctx, e: u32, start: usize) -> Hnf {
        let mut out = Hnf::m_lattice(ctx);
        if e == 0 {
            out.copy_from(self);
            return out;
        }
        let n = self.n;
        let m = n - start;
        let p = ctx.p;
        let pe = p.pow(e);
        // Generating set of the kernel mod p^e, and its image under B,
        // both kept reduced mod p^e.
        let mut coeff = vec![0i64; m * m];
        let mut image = vec![0i64; m * m];
        for i in 0..m {
            coeff[i * m + i] = 1;
            for t in 0..m {
                image[i * m + t] = self.rows[(start + i) * n + (start + t)].rem_euclid(pe);
            }
        }
        for k in 0..m {
            let val_of = |x: i64| if x == 0 { e } else { p_val(x, p).min(e) };
            let mut best: Option<(usize, u32)> = None;
            for i in 0..m {
                let v = val_of(image[i * m + k]);
                if v < e && best.map_or(true, |(_, bv)| v < bv) {
                    best = Some((i, v));
                }
            }
            let Some((pivot, vstar)) = best else { continue };
            let unit = image[pivot * m + k] / p.pow(vstar);
            let scale = p.pow(e - vstar);
            let unit_inv = inv_mod(unit.rem_euclid(scale), scale);
            for i in 0..m {
                if i == pivot {
                    continue;
                }
                let w = image[i * m + k];
                if w == 0 {
                    continue;
                }
                let lambda = ((w / p.pow(vstar)) * unit_inv).rem_euclid(scale);
                if lambda != 0 {
                    for t in 0..m {
                        coeff[i * m + t] =
                            (coeff[i * m + t] - lambda * coeff[pivot * m + t]).rem_euclid(pe);
                        image[i * m + t] =
                            (image[i * m + t] - lambda * image[pivot * m + t]).rem_euclid(pe);
                    }
                }
            }
            for t in 0..m {
                coeff[pivot * m + t] = (coeff[pivot * m + t] * scale).rem_euclid(pe);
                image[pivot * m + t] = (image[pivot * m + t] * scale).rem_euclid(pe);
            }
        }
        // out = HNF of { lift(coeff_i)·B / p^e } ∪ rows(B) ∪ M·Z^n.
        let mut v = vec![0i64; n];
        for i in 0..m {
            v[..start].fill(0);
            for t in 0..m {
                let mut acc = 0i64;
                for l in 0..=t {
                    acc += coeff[i * m + l] * self.rows[(start + l) * n + (start + t)];
                }
                debug_assert_eq!(acc % pe, 0, "kernel image not divisible by p^e");
                v[start + t] = acc / pe;
            }
            out.insert(ctx, &mut v, start);
        }
        for i in start..n {
            v[..start].fill(0);
            v[start..].copy_from_slice(&self.row(i)[start..]);
            out.insert(ctx, &mut v, start);
        }
        out
    }
}

/// Canonicalize the span of `gens` (plus `M·Z^n`) into a Hermite basis.
pub(crate) fn hnf_from_generators(ctx: &Ctx, gens: &[Vec<i64>]) -> Hnf {
    let mut h = Hnf::m_lattice(ctx);
    let mut v = vec![0i64; ctx.n()];
    for g in gens {
        v.copy_from_slice(g);
        h.insert(ctx, &mut v, 0);
    }
    h
}

/// Leaf data handed to subgroup-scan visitors.
pub(crate) struct ScanLeaf<'a> {
    pub hnf: &'a Hnf,
    pub order_exp: u32,
    /// Conjugate type `β*` of the subgroup, when type tracking is on:
    /// `beta_star[k-1] = log_p #(p^{k-1}H) − log_p #(p^k H)`.
    pub beta_star: Option<&'a [u32]>,
}

struct ScanState<'a> {
    ctx: &'a Ctx,
    hnf: Hnf,
    order_exp: u32,
    target: Option<u32>,
    with_type: bool,
    /// `cap_below[c] = Σ_{l<c} α_l`, the order exponent still placeable.
    cap_below: Vec<u32>,
    /// Satellite lattices `p^k·Λ + M·Z^n` per level and `k = 1..a_max`,
    /// used to read off the subgroup type at leaves.
    sats: Option<Vec<Vec<Hnf>>>,
    beta_buf: Vec<u32>,
    scratch: Vec<i64>,
}

/// Visit every subgroup of the group described by `ctx` exactly once, as its
/// canonical Hermite matrix. `target` restricts to subgroups of order
/// `p^target` (with pruning); `with_type` additionally reports the conjugate
/// subgroup type at each leaf.
pub(crate) fn scan_subgroups<F: FnMut(ScanLeaf<'_>)>(
    ctx: &Ctx,
    target: Option<u32>,
    with_type: bool,
    mut visit: F,
) {
    let n = ctx.n();
    let mut cap_below = vec![0u32; n + 1];
    for c in 0..n {
        cap_below[c + 1] = cap_below[c] + ctx.alpha[c];
    }
    let sats = if with_type && ctx.a_max >= 2 {
        let per_level: Vec<Hnf> = (1..ctx.a_max).map(|_| Hnf::m_lattice(ctx)).collect();
        Some(vec![per_level; n + 1])
    } else {
        None
    };
    let mut st = ScanState {
        ctx,
        hnf: Hnf::m_lattice(ctx),
        order_exp: 0,
        target,
        with_type,
        cap_below,
        sats,
        beta_buf: vec![0; ctx.a_max as usize],
        scratch: vec![0i64; n],
    };
    descend(&mut st, n, &mut visit);
}

fn emit_leaf<F: FnMut(ScanLeaf<'_>)>(st: &mut ScanState<'_>, visit: &mut F) {
    if st.with_type {
        let a_max = st.ctx.a_max as usize;
        let mut prev_exp = st.order_exp;
        for k in 1..=a_max {
            // For k = a_max the layer p^k·H is trivial; below that the
            // satellite lattice carries its order.
            let exp_k = if k == a_max {
                0
            } else {
                st.sats.as_ref().unwrap()[0][k - 1].order_exp(st.ctx)
            };
            st.beta_buf[k - 1] = prev_exp - exp_k;
            prev_exp = exp_k;
        }
        visit(ScanLeaf {
            hnf: &st.hnf,
            order_exp: st.order_exp,
            beta_star: Some(&st.beta_buf[..a_max]),
        });
    } else {
        visit(ScanLeaf { hnf: &st.hnf, order_exp: st.order_exp, beta_star: None });
    }
}

fn descend<F: FnMut(ScanLeaf<'_>)>(st: &mut ScanState<'_>, col: usize, visit: &mut F) {
    if col == 0 {
        emit_leaf(st, visit);
        return;
    }
    let c = col - 1;
    let n = st.ctx.n();
    let alpha_c = st.ctx.alpha[c];
    // Exponents of the suffix moduli bound the exponent of the suffix
    // quotient: torsion by p^e is everything once e reaches them.
    let suffix_max_alpha = if col < n { st.ctx.alpha[col] } else { 0 };
    for delta in 0..=alpha_c {
        let gained = alpha_c - delta;
        if let Some(r) = st.target {
            let after = st.order_exp + gained;
            if after > r || after + st.cap_below[c] < r {
                continue;
            }
        }
        let e = alpha_c - delta;
        st.order_exp += gained;
        if e == 0 || col == n {
            // Only the zero tail: write the row and recurse once.
            let row = c * n;
            st.hnf.rows[row..row + n].fill(0);
            st.hnf.rows[row + c] = st.ctx.pp[delta as usize];
            st.hnf.pivot_exp[c] = delta;
            place_satellites(st, col, c);
            descend(st, c, visit);
        } else if e >= suffix_max_alpha {
            // p^e kills the whole suffix quotient: the tail ranges over the
            // full fundamental box. Odometer over mixed radices.
            let row = c * n;
            st.hnf.rows[row..row + n].fill(0);
            st.hnf.rows[row + c] = st.ctx.pp[delta as usize];
            st.hnf.pivot_exp[c] = delta;
            loop {
                place_satellites(st, col, c);
                descend(st, c, visit);
                let mut l = n - 1;
                loop {
                    let radix = st.ctx.pp[st.hnf.pivot_exp[l] as usize];
                    if radix > 1 {
                        st.hnf.rows[row + l] += 1;
                        if st.hnf.rows[row + l] < radix {
                            break;
                        }
                        st.hnf.rows[row + l] = 0;
                    }
                    if l == col {
                        break;
                    }
                    l -= 1;
                }
                if st.hnf.rows[row + col..row + n].iter().all(|&x| x == 0) {
                    break;
                }
            }
        } else {
            // Proper torsion: tails are the box representatives of
            // (Λ : p^e)/Λ on the suffix.
            let division = st.hnf.divide_p_pow(st.ctx, e, col);
            let radices: Vec<i64> = (col..n)
                .map(|l| st.ctx.pp[(st.hnf.pivot_exp[l] - division.pivot_exp[l]) as usize])
                .collect();
            let mut digits = vec![0i64; n - col];
            let row = c * n;
            loop {
                st.hnf.rows[row..row + n].fill(0);
                st.hnf.rows[row + c] = st.ctx.pp[delta as usize];
                st.hnf.pivot_exp[c] = delta;
                for (i, &d) in digits.iter().enumerate() {
                    if d != 0 {
                        let drow = (col + i) * n;
                        for t in col + i..n {
                            st.hnf.rows[row + t] += d * division.rows[drow + t];
                        }
                    }
                }
                // Reduce the accumulated combination into the box of Λ.
                box_reduce_row(&mut st.hnf, st.ctx, c, col);
                place_satellites(st, col, c);
                descend(st, c, visit);
                let mut i = digits.len();
                loop {
                    if i == 0 {
                        break;
                    }
                    i -= 1;
                    if radices[i] > 1 {
                        digits[i] += 1;
                        if digits[i] < radices[i] {
                            break;
                        }
                        digits[i] = 0;
                    }
                }
                if digits.iter().all(|&d| d == 0) {
                    break;
                }
            }
        }
        st.order_exp -= gained;
    }
}

/// Box-reduce the tail (columns `start..`) of row `c` against the rows below.
fn box_reduce_row(hnf: &mut Hnf, ctx: &Ctx, c: usize, start: usize) {
    let n = hnf.n;
    for l in start..n {
        let q = hnf.rows[c * n + l].div_euclid(ctx.pp[hnf.pivot_exp[l] as usize]);
        if q != 0 {
            let lrow = l * n;
            for t in l..n {
                hnf.rows[c * n + t] -= q * hnf.rows[lrow + t];
            }
        }
    }
}

fn place_satellites(st: &mut ScanState<'_>, col: usize, c: usize) {
    let Some(sats) = st.sats.as_mut() else { return };
    let ctx = st.ctx;
    let n = ctx.n();
    let (dst_slice, src_slice) = {
        let (left, right) = sats.split_at_mut(col);
        (&mut left[c], &right[0])
    };
    for (k, (dst, src)) in dst_slice.iter_mut().zip(src_slice.iter()).enumerate() {
        dst.copy_from(src);
        let pk = ctx.pp[k + 1];
        st.scratch[..c].fill(0);
        for t in c..n {
            st.scratch[t] = pk * st.hnf.rows[c * n + t];
        }
        dst.insert(ctx, &mut st.scratch, c);
    }
}

/// Number of subgroups per order exponent `r = 0..=‖α‖`, by exhaustive scan.
pub(crate) fn subgroup_census(ctx: &Ctx) -> Vec<u128> {
    let mut counts = vec![0u128; ctx.weight() as usize + 1];
    scan_subgroups(ctx, None, false, |leaf| {
        counts[leaf.order_exp as usize] += 1;
    });
    counts
}

/// Number of cosets per subgroup-order exponent, by exhaustive scan: for each
/// subgroup every canonical coset representative in its fundamental box is
/// walked and counted individually.
pub(crate) fn coset_census(ctx: &Ctx) -> Vec<u128> {
    let n = ctx.n();
    let mut counts = vec![0u128; ctx.weight() as usize + 1];
    let mut digits = vec![0i64; n];
    let mut radix = vec![0i64; n];
    scan_subgroups(ctx, None, false, |leaf| {
        // Only columns with a nontrivial pivot contribute digits.
        let mut active = 0usize;
        for l in 0..n {
            let r = ctx.pp[leaf.hnf.pivot_exp[l] as usize];
            if r > 1 {
                digits[active] = 0;
                radix[active] = r;
                active += 1;
            }
        }
        let mut walked = 0u128;
        'walk: loop {
            walked += 1;
            let mut i = active;
            while i > 0 {
                i -= 1;
                digits[i] += 1;
                if digits[i] < radix[i] {
                    continue 'walk;
                }
                digits[i] = 0;
            }
            break;
        }
        counts[leaf.order_exp as usize] += walked;
    });
    counts
}
