//! Exact solution counts: a brute-force oracle, separable counting by
//! histogram convolution, Markoff-Hurwitz counts (nonzero coordinates,
//! zero patterns, inclusion-exclusion) and projective counts.

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::bounds::{self, MainTerm, SqrtBound};
use crate::conv::{self, Backend, Group};
use crate::error::{Error, Result};
use crate::gf::{FieldCtx, FieldElement, FieldSpec};
use crate::par::{self, Execution};
use crate::poly::{self, SparsePoly, Term, UniPoly, WeightedPoly};

pub const DEFAULT_BRUTE_CAP: u64 = 1_000_000_000;
const CHUNK: u64 = 1 << 14;
/// Largest `q (q - 1)` for the joint Markoff-Hurwitz table.
const JOINT_LIMIT: u64 = 1 << 26;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CountConfig {
    /// Largest `q^n` the brute-force paths will enumerate.
    pub brute_cap: u64,
    pub backend: Backend,
    pub exec: Execution,
}

impl Default for CountConfig {
    fn default() -> Self {
        CountConfig {
            brute_cap: DEFAULT_BRUTE_CAP,
            backend: Backend::Auto,
            exec: Execution::default(),
        }
    }
}

impl CountConfig {
    pub fn with_exec(exec: Execution) -> Self {
        CountConfig {
            exec,
            ..Self::default()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    All,
    Nonzero,
}

/// `entries[v] = #{x in domain : h(x) = v}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValueHistogram {
    entries: Vec<BigUint>,
}

impl ValueHistogram {
    pub fn entries(&self) -> &[BigUint] {
        &self.entries
    }

    pub fn total(&self) -> BigUint {
        self.entries.iter().sum()
    }

    pub fn get(&self, v: FieldElement) -> &BigUint {
        &self.entries[v.index() as usize]
    }

    pub fn into_entries(self) -> Vec<BigUint> {
        self.entries
    }
}

pub fn value_histogram(ctx: &FieldCtx, h: &UniPoly, domain: Domain) -> ValueHistogram {
    let mut counts = vec![0u64; ctx.q() as usize];
    let els = match domain {
        Domain::All => 0..ctx.q(),
        Domain::Nonzero => 1..ctx.q(),
    };
    for i in els {
        let v = h.eval(ctx, ctx.elem_unchecked(i));
        counts[v.index() as usize] += 1;
    }
    ValueHistogram {
        entries: counts.into_iter().map(BigUint::from).collect(),
    }
}

// ---- brute force -------------------------------------------------------------

fn check_cap(ctx: &FieldCtx, n: usize, cap: u64) -> Result<u64> {
    let total = (ctx.q() as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if total > cap as u128 {
        return Err(Error::TooLarge(format!(
            "q^n = {}^{n} exceeds the brute-force cap {cap}",
            ctx.q()
        )));
    }
    Ok(total as u64)
}

/// Calls `f` on every point of `F_q^n` with linear index in `[lo, hi)`.
/// Coordinate 0 varies slowest.
pub(crate) fn for_each_point<F: FnMut(&[FieldElement])>(ctx: &FieldCtx, n: usize, lo: u64, hi: u64, mut f: F) {
    let q = ctx.q();
    let mut digits = vec![0u64; n];
    let mut v = lo;
    for d in digits.iter_mut().rev() {
        *d = v % q;
        v /= q;
    }
    let mut x: Vec<FieldElement> = digits.iter().map(|&d| ctx.elem_unchecked(d)).collect();
    for _ in lo..hi {
        f(&x);
        for j in (0..n).rev() {
            digits[j] += 1;
            if digits[j] < q {
                x[j] = ctx.elem_unchecked(digits[j]);
                break;
            }
            digits[j] = 0;
            x[j] = FieldElement::ZERO;
        }
    }
}

/// Number of points of `F_q^n` satisfying `pred`.
pub fn count_points<P>(ctx: &FieldCtx, n: usize, cfg: &CountConfig, pred: P) -> Result<u64>
where
    P: Fn(&[FieldElement]) -> bool + Sync + Send,
{
    let total = check_cap(ctx, n, cfg.brute_cap)?;
    Ok(par::sum_chunks(cfg.exec, total, CHUNK, |lo, hi| {
        let mut c = 0u64;
        for_each_point(ctx, n, lo, hi, |x| {
            if pred(x) {
                c += 1;
            }
        });
        c
    }))
}

/// Points of `F_q^n` satisfying `pred`, in enumeration order.
pub fn collect_points<P>(ctx: &FieldCtx, n: usize, cfg: &CountConfig, pred: P) -> Result<Vec<Vec<FieldElement>>>
where
    P: Fn(&[FieldElement]) -> bool + Sync + Send,
{
    let total = check_cap(ctx, n, cfg.brute_cap)?;
    let nchunks = total.div_ceil(CHUNK) as usize;
    let chunks = par::map_indexed(cfg.exec, nchunks, |c| {
        let lo = c as u64 * CHUNK;
        let mut out = Vec::new();
        for_each_point(ctx, n, lo, (lo + CHUNK).min(total), |x| {
            if pred(x) {
                out.push(x.to_vec());
            }
        });
        out
    });
    Ok(chunks.into_iter().flatten().collect())
}

/// Precomputed evaluator for repeated evaluation of one polynomial.
pub struct Evaluator<'a> {
    ctx: &'a FieldCtx,
    n: usize,
    terms: Vec<(FieldElement, Vec<(usize, u64)>)>,
}

impl<'a> Evaluator<'a> {
    pub fn new(ctx: &'a FieldCtx, p: &SparsePoly) -> Self {
        let terms = p
            .terms()
            .iter()
            .map(|t| {
                let vars = t
                    .e
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(i, &e)| (i, e as u64))
                    .collect();
                (t.c, vars)
            })
            .collect();
        Evaluator {
            ctx,
            n: p.nvars(),
            terms,
        }
    }

    #[inline]
    pub fn eval(&self, x: &[FieldElement]) -> FieldElement {
        debug_assert_eq!(x.len(), self.n);
        let ctx = self.ctx;
        let mut acc = FieldElement::ZERO;
        for (c, vars) in &self.terms {
            let mut v = *c;
            for &(i, e) in vars {
                v = ctx.mul(v, ctx.pow(x[i], e));
                if v.is_zero() {
                    break;
                }
            }
            acc = ctx.add(acc, v);
        }
        acc
    }
}

/// `#{x in F_q^n : R(x) = 0}` by enumeration.
pub fn brute_count(ctx: &FieldCtx, r: &SparsePoly, cfg: &CountConfig) -> Result<BigUint> {
    let n = r.nvars();
    let ev = Evaluator::new(ctx, r);
    let count = count_points(ctx, n, cfg, |x| ev.eval(x).is_zero())?;
    check_affine_cardinality(ctx, r, count)?;
    Ok(BigUint::from(count))
}

/// A nonconstant `R` has at most `deg(R) q^(n-1)` affine zeros.
fn check_affine_cardinality(ctx: &FieldCtx, r: &SparsePoly, count: u64) -> Result<()> {
    if let Some(deg) = r.degree().filter(|&d| d > 0) {
        let n = r.nvars() as u32;
        let limit = BigUint::from(deg) * BigUint::from(ctx.q()).pow(n - 1);
        if BigUint::from(count) > limit {
            return Err(Error::InvariantViolation(format!(
                "{count} affine zeros exceed deg * q^(n-1) = {limit}"
            )));
        }
    }
    Ok(())
}

/// First zero of `R` in enumeration order.
pub fn find_solution(ctx: &FieldCtx, r: &SparsePoly, cfg: &CountConfig) -> Result<Option<Vec<FieldElement>>> {
    let n = r.nvars();
    let total = check_cap(ctx, n, cfg.brute_cap)?;
    let ev = Evaluator::new(ctx, r);
    let mut lo = 0;
    while lo < total {
        let hi = (lo + CHUNK).min(total);
        let mut found = None;
        for_each_point(ctx, n, lo, hi, |x| {
            if found.is_none() && ev.eval(x).is_zero() {
                found = Some(x.to_vec());
            }
        });
        if found.is_some() {
            return Ok(found);
        }
        lo = hi;
    }
    Ok(None)
}

// ---- separable counting ------------------------------------------------------

/// Distribution of `sum_i h_i(x_i)` over the product of the domains.
pub fn separable_distribution(
    ctx: &FieldCtx,
    parts: &[(UniPoly, Domain)],
    cfg: &CountConfig,
) -> Result<Vec<BigUint>> {
    let g = Group::of(ctx);
    let mut acc: Option<Vec<BigUint>> = None;
    for (h, dom) in parts {
        let hist = value_histogram(ctx, h, *dom).into_entries();
        acc = Some(match acc {
            None => hist,
            Some(a) => conv::convolve(&g, &a, &hist, cfg.backend, cfg.exec)?,
        });
    }
    Ok(acc.unwrap_or_else(|| {
        let mut v = vec![BigUint::zero(); ctx.q() as usize];
        v[0] = BigUint::one();
        v
    }))
}

/// `#{x : sum_i h_i(x_i) = target}` with per-variable domains.
pub fn separable_count_domains(
    ctx: &FieldCtx,
    parts: &[(UniPoly, Domain)],
    target: FieldElement,
    cfg: &CountConfig,
) -> Result<BigUint> {
    let t = target.index() as usize;
    match parts.split_last() {
        None => Ok(if target.is_zero() {
            BigUint::one()
        } else {
            BigUint::zero()
        }),
        Some(((h, dom), rest)) => {
            let last = value_histogram(ctx, h, *dom).into_entries();
            if rest.is_empty() {
                return Ok(last[t].clone());
            }
            let acc = separable_distribution(ctx, rest, cfg)?;
            Ok(conv::convolve_at(&Group::of(ctx), &acc, &last, t))
        }
    }
}

/// `#{x in F_q^n : sum_i h_i(x_i) = target}`.
pub fn separable_count(
    ctx: &FieldCtx,
    hs: &[UniPoly],
    target: FieldElement,
    cfg: &CountConfig,
) -> Result<BigUint> {
    let parts: Vec<(UniPoly, Domain)> = hs.iter().map(|h| (h.clone(), Domain::All)).collect();
    separable_count_domains(ctx, &parts, target, cfg)
}

// ---- Markoff-Hurwitz ---------------------------------------------------------

/// `sum a_i X_i^m + a = b X_1^{k_1} ... X_n^{k_n}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarkoffHurwitz {
    pub coeffs: Vec<FieldElement>,
    pub m: u32,
    pub a: FieldElement,
    pub b: FieldElement,
    pub k: Vec<u32>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MhMode {
    /// All solutions.
    Full,
    /// Solutions with every coordinate nonzero.
    Nonzero,
    /// Solutions with the first `i` coordinates set to zero (others free).
    ZeroPattern(usize),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum MhMethod {
    #[default]
    Auto,
    Brute,
    Joint,
}

impl MarkoffHurwitz {
    pub fn n(&self) -> usize {
        self.coeffs.len()
    }

    pub fn validate(&self, ctx: &FieldCtx) -> Result<()> {
        if self.k.len() != self.coeffs.len() {
            return Err(Error::DimensionMismatch {
                expected: self.coeffs.len(),
                got: self.k.len(),
            });
        }
        if self.coeffs.is_empty() {
            return Err(Error::InvalidInput("need at least one variable".into()));
        }
        if self.coeffs.iter().any(|c| c.is_zero()) {
            return Err(Error::InvalidInput("coefficients a_i must be nonzero".into()));
        }
        if self.m == 0 || self.k.contains(&0) {
            return Err(Error::InvalidInput("m and k_i must be positive".into()));
        }
        for &e in self.coeffs.iter().chain([&self.a, &self.b]) {
            ctx.elem(e.index())?;
        }
        Ok(())
    }

    pub fn hypotheses(&self, ctx: &FieldCtx) -> Vec<Hypothesis> {
        let ksum: u64 = self.k.iter().map(|&k| k as u64).sum();
        vec![
            Hypothesis::new("char(F_q) does not divide m", !ctx.char_divides(self.m as u64)),
            Hypothesis::new("k_1 + ... + k_n < m", ksum < self.m as u64),
            Hypothesis::new("n >= 3", self.n() >= 3),
            Hypothesis::new("m >= 2", self.m >= 2),
            Hypothesis::new("q > 2", ctx.q() > 2),
        ]
    }

    /// `sum a_i X_i^m + a - b prod X_i^{k_i}`.
    pub fn polynomial(&self, ctx: &FieldCtx) -> SparsePoly {
        let n = self.n();
        let mut terms: Vec<Term> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                let mut e = vec![0; n];
                e[i] = self.m;
                Term { c, e }
            })
            .collect();
        terms.push(Term { c: self.a, e: vec![0; n] });
        terms.push(Term {
            c: ctx.neg(self.b),
            e: self.k.clone(),
        });
        SparsePoly::from_terms(ctx, n, terms).expect("well-formed terms")
    }

    fn power_parts(&self, idx: impl Iterator<Item = usize>, dom: Domain) -> Vec<(UniPoly, Domain)> {
        idx.map(|j| (UniPoly::monomial(self.coeffs[j], self.m as usize), dom))
            .collect()
    }
}

/// Solutions with `x_j = 0` for `j` in `subset`, other coordinates free.
/// Any zero coordinate kills the right-hand side, leaving the diagonal
/// equation `sum_{j not in S} a_j x_j^m = -a`.
pub fn mh_zero_subset(ctx: &FieldCtx, inst: &MarkoffHurwitz, subset: &[usize], cfg: &CountConfig) -> Result<BigUint> {
    let n = inst.n();
    if subset.iter().any(|&j| j >= n) {
        return Err(Error::InvalidInput("zero pattern index out of range".into()));
    }
    if subset.is_empty() {
        return Err(Error::InvalidInput("zero pattern must be nonempty".into()));
    }
    let free = (0..n).filter(|j| !subset.contains(j));
    let parts = inst.power_parts(free, Domain::All);
    separable_count_domains(ctx, &parts, ctx.neg(inst.a), cfg)
}

/// Nonzero-coordinate count.
pub fn mh_nonzero(ctx: &FieldCtx, inst: &MarkoffHurwitz, method: MhMethod, cfg: &CountConfig) -> Result<BigUint> {
    inst.validate(ctx)?;
    if inst.b.is_zero() {
        let parts = inst.power_parts(0..inst.n(), Domain::Nonzero);
        return separable_count_domains(ctx, &parts, ctx.neg(inst.a), cfg);
    }
    let joint_ok = ctx.has_tables() && ctx.q() * (ctx.q() - 1) <= JOINT_LIMIT;
    match method {
        MhMethod::Brute => mh_nonzero_brute(ctx, inst, cfg),
        MhMethod::Joint => mh_nonzero_joint(ctx, inst, cfg),
        MhMethod::Auto if joint_ok => mh_nonzero_joint(ctx, inst, cfg),
        MhMethod::Auto => mh_nonzero_brute(ctx, inst, cfg),
    }
}

fn mh_nonzero_brute(ctx: &FieldCtx, inst: &MarkoffHurwitz, cfg: &CountConfig) -> Result<BigUint> {
    let r = inst.polynomial(ctx);
    let ev = Evaluator::new(ctx, &r);
    let c = count_points(ctx, inst.n(), cfg, |x| x.iter().all(|v| !v.is_zero()) && ev.eval(x).is_zero())?;
    Ok(BigUint::from(c))
}

/// Joint histogram over `(s, t)` with `s = sum a_i x_i^m` (additive) and
/// `t = log prod x_i^{k_i}` (cyclic of order `q - 1`); then
/// `N* = sum_{T != 0} J[b T - a][log T]`.
pub fn mh_nonzero_joint(ctx: &FieldCtx, inst: &MarkoffHurwitz, cfg: &CountConfig) -> Result<BigUint> {
    inst.validate(ctx)?;
    if inst.b.is_zero() {
        return Err(Error::DegenerateB);
    }
    if !ctx.has_tables() {
        return Err(Error::TooLarge(format!(
            "joint count needs exp/log tables (q = {})",
            ctx.q()
        )));
    }
    let q = ctx.q();
    if q * (q - 1) > JOINT_LIMIT {
        return Err(Error::TooLarge(format!("joint table for q = {q}")));
    }
    let bits = (q - 1) as f64;
    if (inst.n() as f64) * bits.log2() >= 126.0 {
        return Err(Error::TooLarge("(q-1)^n exceeds 128-bit counters".into()));
    }
    let qs = q as usize;
    let ord = qs - 1;
    let g = Group::of(ctx);
    let mut joint = vec![0u128; qs * ord];
    joint[0] = 1;
    for (i, &ai) in inst.coeffs.iter().enumerate() {
        let mut shifts: HashMap<(usize, usize), u128> = HashMap::new();
        for x in ctx.nonzero_elements() {
            let s = ctx.mul(ai, ctx.pow(x, inst.m as u64)).index() as usize;
            let t = (ctx.log(x).expect("nonzero") as u128 * inst.k[i] as u128 % ord as u128) as usize;
            *shifts.entry((s, t)).or_insert(0) += 1;
        }
        let mut shifts: Vec<((usize, usize), u128)> = shifts.into_iter().collect();
        shifts.sort_unstable();
        let prev = &joint;
        let rows: Vec<Vec<u128>> = par::map_indexed(cfg.exec, qs, |s_new| {
            let mut row = vec![0u128; ord];
            for &((s, t), c) in &shifts {
                let src = &prev[g.sub(s_new, s) * ord..][..ord];
                // row[t_new] += c * src[t_new - t]
                for (t_new, slot) in row.iter_mut().enumerate() {
                    let v = src[(t_new + ord - t) % ord];
                    if v != 0 {
                        *slot += c * v;
                    }
                }
            }
            row
        });
        joint = rows.concat();
    }
    let mut total = 0u128;
    for tv in ctx.nonzero_elements() {
        let s = ctx.sub(ctx.mul(inst.b, tv), inst.a).index() as usize;
        let t = ctx.log(tv).expect("nonzero") as usize;
        total += joint[s * ord + t];
    }
    Ok(BigUint::from(total))
}

/// Inclusion-exclusion ledger for one instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MhLedger {
    pub full: BigUint,
    pub nonzero: BigUint,
    /// Solutions with at least one zero coordinate.
    pub with_zero: BigUint,
    /// `by_size[i - 1]` lists the fixed-pattern counts for every subset of
    /// size `i`, subsets in lexicographic order.
    pub by_size: Vec<Vec<BigUint>>,
    /// Every size class has a single count.
    pub uniform: bool,
    /// `sum_i (-1)^{i+1} C(n, i) N_i`, only when `uniform`.
    pub binomial: Option<BigInt>,
}

fn subsets_of_size(n: usize, size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(size);
    fn rec(start: usize, n: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for j in start..n {
            cur.push(j);
            rec(j + 1, n, size, cur, out);
            cur.pop();
        }
    }
    rec(0, n, size, &mut cur, &mut out);
    out
}

fn binomial(n: u64, k: u64) -> BigInt {
    let mut r = BigInt::one();
    for j in 0..k {
        r = r * BigInt::from(n - j) / BigInt::from(j + 1);
    }
    r
}

pub fn mh_ledger(ctx: &FieldCtx, inst: &MarkoffHurwitz, method: MhMethod, cfg: &CountConfig) -> Result<MhLedger> {
    inst.validate(ctx)?;
    let n = inst.n();
    let nonzero = mh_nonzero(ctx, inst, method, cfg)?;
    // A_S depends only on the surviving coefficients; memoize on them.
    let mut memo: HashMap<Vec<u64>, BigUint> = HashMap::new();
    let mut by_size = Vec::with_capacity(n);
    let mut alternating = BigInt::zero();
    for size in 1..=n {
        let mut counts = Vec::new();
        for s in subsets_of_size(n, size) {
            let mut key: Vec<u64> = (0..n)
                .filter(|j| !s.contains(j))
                .map(|j| inst.coeffs[j].index())
                .collect();
            key.sort_unstable();
            let c = match memo.get(&key) {
                Some(c) => c.clone(),
                None => {
                    let c = mh_zero_subset(ctx, inst, &s, cfg)?;
                    memo.insert(key, c.clone());
                    c
                }
            };
            let signed = BigInt::from(c.clone());
            if size % 2 == 1 {
                alternating += signed;
            } else {
                alternating -= signed;
            }
            counts.push(c);
        }
        by_size.push(counts);
    }
    let with_zero = alternating
        .to_biguint()
        .ok_or_else(|| Error::InvariantViolation("negative inclusion-exclusion total".into()))?;
    let uniform = by_size.iter().all(|v| v.iter().all(|c| *c == v[0]));
    let binomial_total = uniform.then(|| {
        by_size
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let i = i as u64 + 1;
                let term = binomial(n as u64, i) * BigInt::from(v[0].clone());
                if i % 2 == 1 {
                    term
                } else {
                    -term
                }
            })
            .sum::<BigInt>()
    });
    Ok(MhLedger {
        full: &nonzero + &with_zero,
        nonzero,
        with_zero,
        by_size,
        uniform,
        binomial: binomial_total,
    })
}

pub fn mh_counts(ctx: &FieldCtx, inst: &MarkoffHurwitz, mode: MhMode, cfg: &CountConfig) -> Result<BigUint> {
    inst.validate(ctx)?;
    match mode {
        MhMode::Nonzero => mh_nonzero(ctx, inst, MhMethod::Auto, cfg),
        MhMode::ZeroPattern(i) => {
            if i == 0 || i > inst.n() {
                return Err(Error::InvalidInput(format!("zero pattern size {i} outside 1..={}", inst.n())));
            }
            let s: Vec<usize> = (0..i).collect();
            mh_zero_subset(ctx, inst, &s, cfg)
        }
        MhMode::Full => Ok(mh_ledger(ctx, inst, MhMethod::Auto, cfg)?.full),
    }
}

// ---- projective counts -------------------------------------------------------

/// Projective zeros of a nonzero form: `(affine zeros - 1) / (q - 1)`.
pub fn projective_count(ctx: &FieldCtx, h: &SparsePoly, cfg: &CountConfig) -> Result<BigUint> {
    if h.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if !h.is_homogeneous() {
        return Err(Error::NotHomogeneous);
    }
    if h.is_constant() {
        return Ok(BigUint::zero());
    }
    let affine = brute_count(ctx, h, cfg)?;
    let qm1 = BigUint::from(ctx.q() - 1);
    let shifted = affine - BigUint::one();
    if !(&shifted % &qm1).is_zero() {
        return Err(Error::InvariantViolation(format!(
            "affine cone count {} - 1 not divisible by q - 1",
            &shifted + 1u32
        )));
    }
    let proj = shifted / qm1;
    // deg * p_{n-2} ceiling for a projective hypersurface
    let n = h.nvars() as i64;
    let deg = h.degree().expect("nonzero");
    let p = MainTerm::projective(ctx.q(), n - 2);
    if BigInt::from(proj.clone()) * BigInt::one() > BigInt::from(deg) * p.numer() {
        return Err(Error::InvariantViolation(format!(
            "{proj} projective zeros exceed deg * p_(n-2)"
        )));
    }
    Ok(proj)
}

/// Points of the projective closure on the hyperplane at infinity.
pub fn count_at_infinity(ctx: &FieldCtx, r: &SparsePoly, cfg: &CountConfig) -> Result<BigUint> {
    let top = r.top_degree_component()?;
    if top.is_constant() {
        return Ok(BigUint::zero());
    }
    projective_count(ctx, &top, cfg)
}

/// `|pcl(V)(F_q)| = |V(F_q)| + |V^inf(F_q)|`.
pub fn pcl_count(ctx: &FieldCtx, r: &SparsePoly, cfg: &CountConfig) -> Result<BigUint> {
    let affine = brute_count(ctx, r, cfg)?;
    let inf = count_at_infinity(ctx, r, cfg)?;
    Ok(affine + inf)
}

// ---- instances ---------------------------------------------------------------

/// A named hypothesis and whether it holds for an instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hypothesis {
    pub name: String,
    pub holds: bool,
}

impl Hypothesis {
    pub fn new(name: &str, holds: bool) -> Self {
        Hypothesis {
            name: name.to_string(),
            holds,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    DeformedDiagonal,
    MarkoffHurwitz,
    Carlitz,
    Dickson,
    GeneralRg,
    Diagonal,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::DeformedDiagonal => "deformed_diagonal",
            Family::MarkoffHurwitz => "markoff_hurwitz",
            Family::Carlitz => "carlitz",
            Family::Dickson => "dickson",
            Family::GeneralRg => "general_rg",
            Family::Diagonal => "diagonal",
        }
    }
}

/// The equation families, as exchanged in JSON.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum EquationInstance {
    /// `sum c_i X_i^m + g = 0`, `deg g < m`.
    DeformedDiagonal {
        field: FieldSpec,
        coeffs: Vec<FieldElement>,
        m: u32,
        g: SparsePoly,
    },
    MarkoffHurwitz {
        field: FieldSpec,
        n: usize,
        m: u32,
        a: FieldElement,
        b: FieldElement,
        coeffs: Vec<FieldElement>,
        k: Vec<u32>,
    },
    /// `sum h_i(X_i) = g`, `deg g < d`.
    Carlitz {
        field: FieldSpec,
        h: Vec<UniPoly>,
        g: SparsePoly,
    },
    /// `sum c_i D_d(X_i, a_i) = g`.
    Dickson {
        field: FieldSpec,
        coeffs: Vec<FieldElement>,
        d: u32,
        a: Vec<FieldElement>,
        g: SparsePoly,
    },
    /// `R = f(P_{m_1}, ..., P_{m_d}) + g = 0`; `f` and `g` are optional
    /// provenance used for hypothesis checks and bound selection.
    GeneralRg {
        field: FieldSpec,
        #[serde(rename = "R")]
        r: SparsePoly,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        f: Option<WeightedPoly>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        g: Option<SparsePoly>,
    },
    /// `sum c_i X_i^m = rhs`.
    Diagonal {
        field: FieldSpec,
        coeffs: Vec<FieldElement>,
        m: u32,
        rhs: FieldElement,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CounterKind {
    /// Brute-force enumeration.
    Oracle,
    /// Histogram convolution or the Markoff-Hurwitz ledger when applicable.
    Fast,
}

fn check_len<T>(v: &[T], n: usize) -> Result<()> {
    if v.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: v.len(),
        });
    }
    Ok(())
}

fn check_nonzero(v: &[FieldElement], what: &str) -> Result<()> {
    if v.iter().any(|c| c.is_zero()) {
        return Err(Error::InvalidInput(format!("{what} must be nonzero")));
    }
    Ok(())
}

fn deg_below(g: &SparsePoly, bound: u32) -> bool {
    g.degree().is_none_or(|d| d < bound as u64)
}

impl EquationInstance {
    pub fn family(&self) -> Family {
        match self {
            EquationInstance::DeformedDiagonal { .. } => Family::DeformedDiagonal,
            EquationInstance::MarkoffHurwitz { .. } => Family::MarkoffHurwitz,
            EquationInstance::Carlitz { .. } => Family::Carlitz,
            EquationInstance::Dickson { .. } => Family::Dickson,
            EquationInstance::GeneralRg { .. } => Family::GeneralRg,
            EquationInstance::Diagonal { .. } => Family::Diagonal,
        }
    }

    pub fn field(&self) -> &FieldSpec {
        match self {
            EquationInstance::DeformedDiagonal { field, .. }
            | EquationInstance::MarkoffHurwitz { field, .. }
            | EquationInstance::Carlitz { field, .. }
            | EquationInstance::Dickson { field, .. }
            | EquationInstance::GeneralRg { field, .. }
            | EquationInstance::Diagonal { field, .. } => field,
        }
    }

    pub fn ctx(&self) -> Result<FieldCtx> {
        FieldCtx::from_spec(self.field())
    }

    pub fn n(&self) -> usize {
        match self {
            EquationInstance::DeformedDiagonal { coeffs, .. }
            | EquationInstance::Dickson { coeffs, .. }
            | EquationInstance::Diagonal { coeffs, .. }
            | EquationInstance::MarkoffHurwitz { coeffs, .. } => coeffs.len(),
            EquationInstance::Carlitz { h, .. } => h.len(),
            EquationInstance::GeneralRg { r, .. } => r.nvars(),
        }
    }

    /// Degree parameter (`m` or `d`); for `general_rg` the degree of `R`.
    pub fn param(&self) -> u64 {
        match self {
            EquationInstance::DeformedDiagonal { m, .. }
            | EquationInstance::MarkoffHurwitz { m, .. }
            | EquationInstance::Diagonal { m, .. } => *m as u64,
            EquationInstance::Dickson { d, .. } => *d as u64,
            EquationInstance::Carlitz { h, .. } => h.iter().filter_map(|p| p.degree()).max().unwrap_or(0) as u64,
            EquationInstance::GeneralRg { r, .. } => r.degree().unwrap_or(0),
        }
    }

    pub fn as_mh(&self) -> Option<MarkoffHurwitz> {
        match self {
            EquationInstance::MarkoffHurwitz { m, a, b, coeffs, k, .. } => Some(MarkoffHurwitz {
                coeffs: coeffs.clone(),
                m: *m,
                a: *a,
                b: *b,
                k: k.clone(),
            }),
            _ => None,
        }
    }

    /// Structural checks (shapes, ranges, nonzero coefficients). Mathematical
    /// hypotheses are reported by [`EquationInstance::hypotheses`] instead.
    pub fn validate(&self, ctx: &FieldCtx) -> Result<()> {
        let n = self.n();
        if n == 0 {
            return Err(Error::InvalidInput("need at least one variable".into()));
        }
        let in_field = |v: &[FieldElement]| v.iter().try_for_each(|e| ctx.elem(e.index()).map(|_| ()));
        match self {
            EquationInstance::DeformedDiagonal { coeffs, m, g, .. } => {
                in_field(coeffs)?;
                check_nonzero(coeffs, "coefficients c_i")?;
                check_len(&vec![(); g.nvars()], n)?;
                g.normalized(ctx)?;
                if *m == 0 {
                    return Err(Error::InvalidInput("m must be positive".into()));
                }
            }
            EquationInstance::MarkoffHurwitz { n: nn, .. } => {
                check_len(&vec![(); *nn], n)?;
                self.as_mh().expect("mh").validate(ctx)?;
            }
            EquationInstance::Carlitz { h, g, .. } => {
                for p in h {
                    p.normalized(ctx)?;
                }
                check_len(&vec![(); g.nvars()], n)?;
                g.normalized(ctx)?;
            }
            EquationInstance::Dickson { coeffs, d, a, g, .. } => {
                in_field(coeffs)?;
                in_field(a)?;
                check_nonzero(coeffs, "coefficients c_i")?;
                check_len(a, n)?;
                check_len(&vec![(); g.nvars()], n)?;
                g.normalized(ctx)?;
                if *d == 0 {
                    return Err(Error::InvalidInput("d must be positive".into()));
                }
            }
            EquationInstance::GeneralRg { r, f, g, .. } => {
                r.normalized(ctx)?;
                if let Some(g) = g {
                    check_len(&vec![(); g.nvars()], n)?;
                }
                if let Some(f) = f {
                    WeightedPoly::new(f.weights.clone(), f.inner.clone())?;
                }
            }
            EquationInstance::Diagonal { coeffs, m, rhs, .. } => {
                in_field(coeffs)?;
                in_field(&[*rhs])?;
                check_nonzero(coeffs, "coefficients c_i")?;
                if *m == 0 {
                    return Err(Error::InvalidInput("m must be positive".into()));
                }
            }
        }
        Ok(())
    }

    pub fn hypotheses(&self, ctx: &FieldCtx) -> Vec<Hypothesis> {
        let n = self.n();
        let nd = |p: u64| !ctx.char_divides(p);
        match self {
            EquationInstance::DeformedDiagonal { m, g, .. } => vec![
                Hypothesis::new("char(F_q) does not divide m", nd(*m as u64)),
                Hypothesis::new("deg g < m", deg_below(g, *m)),
                Hypothesis::new("n >= 3", n >= 3),
            ],
            EquationInstance::MarkoffHurwitz { .. } => self.as_mh().expect("mh").hypotheses(ctx),
            EquationInstance::Carlitz { h, g, .. } => {
                let d = self.param() as u32;
                vec![
                    Hypothesis::new("deg h_i = d for all i", h.iter().all(|p| p.degree() == Some(d as usize))),
                    Hypothesis::new("d >= 2", d >= 2),
                    Hypothesis::new("char(F_q) does not divide d", nd(d as u64)),
                    Hypothesis::new("deg g < d", deg_below(g, d)),
                    Hypothesis::new("n >= 3", n >= 3),
                ]
            }
            EquationInstance::Dickson { d, g, .. } => vec![
                Hypothesis::new("d >= 2", *d >= 2),
                Hypothesis::new("char(F_q) does not divide d", nd(*d as u64)),
                Hypothesis::new("deg g < d", deg_below(g, *d)),
                Hypothesis::new("n >= 3", n >= 3),
            ],
            EquationInstance::GeneralRg { f, g, .. } => {
                let mut out = Vec::new();
                if let Some(f) = f {
                    let ok = f.weights.iter().all(|&m| nd(m as u64));
                    out.push(Hypothesis::new("char(F_q) does not divide any m_j", ok));
                    let d = f.d();
                    out.push(Hypothesis::new("1 <= d <= n - 3", d >= 1 && d + 3 <= n));
                }
                if let Some(g) = g {
                    if let Some(e) = g.diagonal_top_degree() {
                        out.push(Hypothesis::new("char(F_q) does not divide e", nd(e as u64)));
                    } else {
                        out.push(Hypothesis::new(
                            "g = X_1^e + ... + X_n^e + g_1 or g constant",
                            g.is_constant(),
                        ));
                    }
                }
                out
            }
            EquationInstance::Diagonal { m, .. } => vec![Hypothesis::new(
                "char(F_q) does not divide m",
                nd(*m as u64),
            )],
        }
    }

    /// `R` with solution set `{R = 0}`.
    pub fn polynomial(&self, ctx: &FieldCtx) -> Result<SparsePoly> {
        let n = self.n();
        let diag = |coeffs: &[FieldElement], m: u32| -> SparsePoly {
            let terms = coeffs
                .iter()
                .enumerate()
                .map(|(i, &c)| {
                    let mut e = vec![0; n];
                    e[i] = m;
                    Term { c, e }
                })
                .collect();
            SparsePoly::from_terms(ctx, n, terms).expect("distinct monomials")
        };
        let sum_uni = |hs: &[UniPoly]| -> Result<SparsePoly> {
            let mut acc = SparsePoly::zero(n);
            for (i, h) in hs.iter().enumerate() {
                acc = acc.add(ctx, &h.to_sparse(ctx, n, i))?;
            }
            Ok(acc)
        };
        match self {
            EquationInstance::DeformedDiagonal { coeffs, m, g, .. } => diag(coeffs, *m).add(ctx, &g.normalized(ctx)?),
            EquationInstance::MarkoffHurwitz { .. } => Ok(self.as_mh().expect("mh").polynomial(ctx)),
            EquationInstance::Carlitz { h, g, .. } => sum_uni(h)?.sub(ctx, &g.normalized(ctx)?),
            EquationInstance::Dickson { coeffs, d, a, g, .. } => {
                let hs: Vec<UniPoly> = coeffs
                    .iter()
                    .zip(a)
                    .map(|(&c, &ai)| poly::dickson(ctx, *d, ai).scale(ctx, c))
                    .collect();
                sum_uni(&hs)?.sub(ctx, &g.normalized(ctx)?)
            }
            EquationInstance::GeneralRg { r, .. } => r.normalized(ctx),
            EquationInstance::Diagonal { coeffs, m, rhs, .. } => {
                Ok(diag(coeffs, *m).sub(ctx, &SparsePoly::constant(n, *rhs))?)
            }
        }
    }

    /// `(h_1, ..., h_n, target)` with solutions `sum h_i(x_i) = target`, when
    /// the instance is separable.
    pub fn separable_form(&self, ctx: &FieldCtx) -> Option<(Vec<UniPoly>, FieldElement)> {
        let mono = |coeffs: &[FieldElement], m: u32| -> Vec<UniPoly> {
            coeffs.iter().map(|&c| UniPoly::monomial(c, m as usize)).collect()
        };
        match self {
            EquationInstance::DeformedDiagonal { coeffs, m, g, .. } => {
                let c = g.as_constant()?;
                Some((mono(coeffs, *m), ctx.neg(c)))
            }
            EquationInstance::MarkoffHurwitz { coeffs, m, a, b, .. } if b.is_zero() => {
                Some((mono(coeffs, *m), ctx.neg(*a)))
            }
            EquationInstance::Carlitz { h, g, .. } => Some((h.clone(), g.as_constant()?)),
            EquationInstance::Dickson { coeffs, d, a, g, .. } => {
                let c = g.as_constant()?;
                let hs = coeffs
                    .iter()
                    .zip(a)
                    .map(|(&ci, &ai)| poly::dickson(ctx, *d, ai).scale(ctx, ci))
                    .collect();
                Some((hs, c))
            }
            EquationInstance::Diagonal { coeffs, m, rhs, .. } => Some((mono(coeffs, *m), *rhs)),
            _ => None,
        }
    }

    pub fn count(&self, ctx: &FieldCtx, kind: CounterKind, cfg: &CountConfig) -> Result<BigUint> {
        self.validate(ctx)?;
        match kind {
            CounterKind::Oracle => brute_count(ctx, &self.polynomial(ctx)?, cfg),
            CounterKind::Fast => {
                if let Some((hs, t)) = self.separable_form(ctx) {
                    return separable_count(ctx, &hs, t, cfg);
                }
                if let Some(mh) = self.as_mh() {
                    return mh_counts(ctx, &mh, MhMode::Full, cfg);
                }
                brute_count(ctx, &self.polynomial(ctx)?, cfg)
            }
        }
    }

    pub fn find_solution(&self, ctx: &FieldCtx, cfg: &CountConfig) -> Result<Option<Vec<FieldElement>>> {
        find_solution(ctx, &self.polynomial(ctx)?, cfg)
    }
}

// ---- reports -----------------------------------------------------------------

/// Exact count with its main term, deviation and (optionally) a verdict.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountReport {
    pub family: String,
    pub q: u64,
    pub n: usize,
    pub count: BigUint,
    pub main: MainTerm,
    pub delta: BigRational,
    pub bound: Option<SqrtBound>,
    pub holds: Option<bool>,
    pub margin: Option<String>,
}

impl CountReport {
    pub fn new(family: &str, q: u64, n: usize, count: BigUint, main: MainTerm, bound: Option<SqrtBound>) -> Self {
        let signed = BigInt::from(count.clone());
        let (delta, holds, margin) = match &bound {
            Some(b) => {
                let v = bounds::check_bound(&signed, &main, b);
                (v.delta, Some(v.holds), Some(v.margin))
            }
            None => {
                let d = BigRational::from_integer(signed) - main.value();
                (if d < BigRational::zero() { -d } else { d }, None, None)
            }
        };
        CountReport {
            family: family.to_string(),
            q,
            n,
            count,
            main,
            delta,
            bound,
            holds,
            margin,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut v = serde_json::json!({
            "family": self.family,
            "q": self.q,
            "n": self.n,
            "N": self.count.to_string(),
            "main_num": self.main.numer().to_string(),
            "main_den": self.main.denom().to_string(),
            "delta_num": self.delta.numer().to_string(),
            "delta_den": self.delta.denom().to_string(),
        });
        if let Some(b) = &self.bound {
            v["A"] = b.a.to_string().into();
            v["B"] = b.b.to_string().into();
            if b.scale != 0 {
                v["scale"] = b.scale.into();
            }
            v["holds"] = self.holds.into();
            v["margin"] = self.margin.clone().into();
        }
        v
    }
}

/// Saturating conversion used when a count must fit a machine word.
pub fn to_u64(x: &BigUint) -> Option<u64> {
    x.to_u64()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> CountConfig {
        CountConfig::default()
    }

    fn sp(f: &FieldCtx, n: usize, terms: &[(i64, &[u32])]) -> SparsePoly {
        SparsePoly::from_terms(
            f,
            n,
            terms
                .iter()
                .map(|(c, e)| Term {
                    c: f.from_int(*c),
                    e: e.to_vec(),
                })
                .collect(),
        )
        .unwrap()
    }

    fn uni(f: &FieldCtx, c: &[u64]) -> UniPoly {
        UniPoly::from_indices(f, c).unwrap()
    }

    fn b(x: u64) -> BigUint {
        BigUint::from(x)
    }

    #[test]
    fn brute_examples() {
        let f3 = FieldCtx::prime(3).unwrap();
        let circle = sp(&f3, 2, &[(1, &[2, 0]), (1, &[0, 2]), (-1, &[0, 0])]);
        assert_eq!(brute_count(&f3, &circle, &cfg()).unwrap(), b(4));
        let cone = sp(&f3, 3, &[(1, &[2, 0, 0]), (1, &[0, 2, 0]), (1, &[0, 0, 2])]);
        assert_eq!(brute_count(&f3, &cone, &cfg()).unwrap(), b(9));
        let f5 = FieldCtx::prime(5).unwrap();
        assert_eq!(brute_count(&f5, &SparsePoly::constant(2, f5.one()), &cfg()).unwrap(), b(0));
        let tight = CountConfig {
            brute_cap: 100,
            ..cfg()
        };
        assert!(matches!(brute_count(&f5, &sp(&f5, 3, &[(1, &[1, 0, 0])]), &tight), Err(Error::TooLarge(_))));
    }

    #[test]
    fn histogram_examples() {
        let f3 = FieldCtx::prime(3).unwrap();
        let sq = uni(&f3, &[0, 0, 1]);
        assert_eq!(value_histogram(&f3, &sq, Domain::All).entries(), &[b(1), b(2), b(0)]);
        assert_eq!(value_histogram(&f3, &sq, Domain::Nonzero).entries(), &[b(0), b(2), b(0)]);
        let f5 = FieldCtx::prime(5).unwrap();
        let t = uni(&f5, &[0, 1]);
        assert_eq!(value_histogram(&f5, &t, Domain::All).entries(), &vec![b(1); 5][..]);
    }

    #[test]
    fn separable_examples() {
        let f3 = FieldCtx::prime(3).unwrap();
        let sq = uni(&f3, &[0, 0, 1]);
        assert_eq!(separable_count(&f3, &[sq.clone(), sq.clone()], f3.one(), &cfg()).unwrap(), b(4));
        assert_eq!(separable_count(&f3, &[sq.clone(), sq.clone(), sq], f3.zero(), &cfg()).unwrap(), b(9));
        for q in [4u64, 7, 9] {
            let f = FieldCtx::from_q(q).unwrap();
            let t = uni(&f, &[0, 1]);
            for target in f.elements() {
                let c = separable_count(&f, &vec![t.clone(); 3], target, &cfg()).unwrap();
                assert_eq!(c, b(q * q));
            }
        }
    }

    #[test]
    fn separable_backends_agree_on_larger_field() {
        let f = FieldCtx::prime(601).unwrap();
        let h = uni(&f, &[3, 0, 5, 1]);
        let mut results = Vec::new();
        for backend in [Backend::Naive, Backend::Ntt] {
            let c = CountConfig { backend, ..cfg() };
            results.push(separable_count(&f, &vec![h.clone(); 3], f.from_int(17), &c).unwrap());
        }
        assert_eq!(results[0], results[1]);
    }

    fn mh_f3() -> MarkoffHurwitz {
        let f3 = FieldCtx::prime(3).unwrap();
        MarkoffHurwitz {
            coeffs: vec![f3.one(); 3],
            m: 2,
            a: f3.one(),
            b: f3.one(),
            k: vec![1, 1, 1],
        }
    }

    #[test]
    fn markoff_hurwitz_f3_example() {
        let f3 = FieldCtx::prime(3).unwrap();
        let inst = mh_f3();
        assert_eq!(mh_counts(&f3, &inst, MhMode::Full, &cfg()).unwrap(), b(16));
        assert_eq!(mh_counts(&f3, &inst, MhMode::Nonzero, &cfg()).unwrap(), b(4));
        assert_eq!(mh_counts(&f3, &inst, MhMode::ZeroPattern(1), &cfg()).unwrap(), b(4));
        assert_eq!(mh_counts(&f3, &inst, MhMode::ZeroPattern(2), &cfg()).unwrap(), b(0));
        let ledger = mh_ledger(&f3, &inst, MhMethod::Auto, &cfg()).unwrap();
        assert_eq!(ledger.with_zero, b(12));
        assert!(ledger.uniform);
        assert_eq!(ledger.binomial, Some(BigInt::from(12)));
        assert_eq!(brute_count(&f3, &inst.polynomial(&f3), &cfg()).unwrap(), b(16));
        assert_eq!(mh_nonzero(&f3, &inst, MhMethod::Brute, &cfg()).unwrap(), b(4));
        assert_eq!(mh_nonzero(&f3, &inst, MhMethod::Joint, &cfg()).unwrap(), b(4));
    }

    #[test]
    fn markoff_hurwitz_b_zero_is_diagonal() {
        let f5 = FieldCtx::prime(5).unwrap();
        let inst = MarkoffHurwitz {
            coeffs: vec![f5.one(), f5.from_int(2), f5.from_int(3)],
            m: 4,
            a: f5.from_int(2),
            b: f5.zero(),
            k: vec![1, 1, 1],
        };
        assert_eq!(mh_nonzero_joint(&f5, &inst, &cfg()), Err(Error::DegenerateB));
        let hs: Vec<UniPoly> = inst.coeffs.iter().map(|&c| UniPoly::monomial(c, 4)).collect();
        let diag = separable_count(&f5, &hs, f5.neg(inst.a), &cfg()).unwrap();
        assert_eq!(mh_counts(&f5, &inst, MhMode::Full, &cfg()).unwrap(), diag);
        assert_eq!(brute_count(&f5, &inst.polynomial(&f5), &cfg()).unwrap(), diag);
    }

    #[test]
    fn joint_matches_brute_on_extension_field() {
        let f = FieldCtx::from_q(9).unwrap();
        let inst = MarkoffHurwitz {
            coeffs: vec![f.elem(1).unwrap(), f.elem(5).unwrap(), f.elem(7).unwrap()],
            m: 4,
            a: f.elem(3).unwrap(),
            b: f.elem(4).unwrap(),
            k: vec![1, 2, 1],
        };
        let j = mh_nonzero(&f, &inst, MhMethod::Joint, &cfg()).unwrap();
        let br = mh_nonzero(&f, &inst, MhMethod::Brute, &cfg()).unwrap();
        assert_eq!(j, br);
        let ledger = mh_ledger(&f, &inst, MhMethod::Joint, &cfg()).unwrap();
        assert_eq!(ledger.full, brute_count(&f, &inst.polynomial(&f), &cfg()).unwrap());
        assert!(!ledger.uniform || ledger.binomial == Some(BigInt::from(ledger.with_zero.clone())));
    }

    #[test]
    fn projective_examples() {
        let f3 = FieldCtx::prime(3).unwrap();
        let cone = sp(&f3, 3, &[(1, &[2, 0, 0]), (1, &[0, 2, 0]), (1, &[0, 0, 2])]);
        assert_eq!(projective_count(&f3, &cone, &cfg()).unwrap(), b(4));
        for q in [3u64, 4, 5] {
            let f = FieldCtx::from_q(q).unwrap();
            let x1 = sp(&f, 2, &[(1, &[1, 0])]);
            assert_eq!(projective_count(&f, &x1, &cfg()).unwrap(), b(1));
        }
        // x^2 + y^2 over F_3 has only the trivial zero.
        let anis = sp(&f3, 2, &[(1, &[2, 0]), (1, &[0, 2])]);
        assert_eq!(projective_count(&f3, &anis, &cfg()).unwrap(), b(0));
        let affine = sp(&f3, 2, &[(1, &[2, 0]), (1, &[0, 0])]);
        assert_eq!(projective_count(&f3, &affine, &cfg()), Err(Error::NotHomogeneous));
    }

    #[test]
    fn infinity_and_closure_examples() {
        let f3 = FieldCtx::prime(3).unwrap();
        let circle = sp(&f3, 2, &[(1, &[2, 0]), (1, &[0, 2]), (-1, &[0, 0])]);
        assert_eq!(count_at_infinity(&f3, &circle, &cfg()).unwrap(), b(0));
        assert_eq!(pcl_count(&f3, &circle, &cfg()).unwrap(), b(4));
        for q in [3u64, 4, 5, 7] {
            let f = FieldCtx::from_q(q).unwrap();
            let lin = sp(&f, 3, &[(1, &[1, 0, 0]), (2, &[0, 1, 0]), (1, &[0, 0, 0])]);
            // p_2 = q^2 + q + 1
            assert_eq!(pcl_count(&f, &lin, &cfg()).unwrap(), b(q * q + q + 1));
            let c = SparsePoly::constant(3, f.one());
            assert_eq!(brute_count(&f, &c, &cfg()).unwrap(), b(0));
            assert_eq!(count_at_infinity(&f, &c, &cfg()).unwrap(), b(0));
        }
    }

    #[test]
    fn instance_json_roundtrip_and_counts() {
        let json = r#"{"family": "markoff_hurwitz", "field": {"p": 3, "k": 1}, "n": 3, "m": 2,
                       "a": 1, "b": 1, "coeffs": [1, 1, 1], "k": [1, 1, 1]}"#;
        let inst: EquationInstance = serde_json::from_str(json).unwrap();
        let ctx = inst.ctx().unwrap();
        assert_eq!(inst.count(&ctx, CounterKind::Fast, &cfg()).unwrap(), b(16));
        assert_eq!(inst.count(&ctx, CounterKind::Oracle, &cfg()).unwrap(), b(16));
        let hyp = inst.hypotheses(&ctx);
        assert!(hyp.iter().any(|h| h.name.starts_with("k_1") && !h.holds));
        let back: EquationInstance = serde_json::from_str(&serde_json::to_string(&inst).unwrap()).unwrap();
        assert_eq!(back, inst);

        let rg = r#"{"family": "general_rg", "field": {"p": 5},
                     "R": {"n": 2, "terms": [{"c": 1, "e": [2, 0]}, {"c": 1, "e": [0, 2]}, {"c": 4, "e": [0, 0]}]}}"#;
        let inst: EquationInstance = serde_json::from_str(rg).unwrap();
        let ctx = inst.ctx().unwrap();
        // x^2 + y^2 = 1 over F_5: q - 1 = 4 points
        assert_eq!(inst.count(&ctx, CounterKind::Fast, &cfg()).unwrap(), b(4));
    }

    #[test]
    fn dickson_and_carlitz_instances_match_oracle() {
        let f = FieldCtx::prime(7).unwrap();
        let dk = EquationInstance::Dickson {
            field: FieldSpec::prime(7),
            coeffs: vec![f.one(), f.from_int(3), f.from_int(5)],
            d: 3,
            a: vec![f.from_int(2), f.zero(), f.from_int(6)],
            g: SparsePoly::constant(3, f.from_int(4)),
        };
        assert_eq!(
            dk.count(&f, CounterKind::Fast, &cfg()).unwrap(),
            dk.count(&f, CounterKind::Oracle, &cfg()).unwrap()
        );
        let cz = EquationInstance::Carlitz {
            field: FieldSpec::prime(7),
            h: vec![uni(&f, &[1, 2, 3]), uni(&f, &[0, 0, 1]), uni(&f, &[6, 1, 5])],
            g: SparsePoly::constant(3, f.from_int(2)),
        };
        assert_eq!(
            cz.count(&f, CounterKind::Fast, &cfg()).unwrap(),
            cz.count(&f, CounterKind::Oracle, &cfg()).unwrap()
        );
    }

    #[test]
    fn solution_search() {
        let f3 = FieldCtx::prime(3).unwrap();
        let circle = sp(&f3, 2, &[(1, &[2, 0]), (1, &[0, 2]), (-1, &[0, 0])]);
        let x = find_solution(&f3, &circle, &cfg()).unwrap().unwrap();
        assert!(circle.eval(&f3, &x).unwrap().is_zero());
        assert_eq!(find_solution(&f3, &SparsePoly::constant(2, f3.one()), &cfg()).unwrap(), None);
    }
}
