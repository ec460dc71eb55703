//! Univariate and sparse multivariate polynomials over `F_q`, power sums,
//! weighted polynomials and Dickson polynomials.

use std::cmp::Ordering;
use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{FieldCtx, FieldElement};

/// Hard ceiling on the number of terms produced by an expansion.
pub const TERM_CAP: usize = 10_000_000;

/// Univariate polynomial, coefficients low to high, no trailing zeros.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct UniPoly {
    coeffs: Vec<FieldElement>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<FieldElement>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    /// From canonical indices, validated against `ctx`.
    pub fn from_indices(ctx: &FieldCtx, idx: &[u64]) -> Result<Self> {
        let coeffs = idx.iter().map(|&i| ctx.elem(i)).collect::<Result<Vec<_>>>()?;
        Ok(UniPoly::new(coeffs))
    }

    /// Re-validates a deserialized value.
    pub fn normalized(&self, ctx: &FieldCtx) -> Result<Self> {
        let idx: Vec<u64> = self.coeffs.iter().map(|c| c.index()).collect();
        Self::from_indices(ctx, &idx)
    }

    pub fn monomial(c: FieldElement, e: usize) -> Self {
        let mut coeffs = vec![FieldElement::ZERO; e + 1];
        coeffs[e] = c;
        UniPoly::new(coeffs)
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn eval(&self, ctx: &FieldCtx, x: FieldElement) -> FieldElement {
        self.coeffs
            .iter()
            .rev()
            .fold(FieldElement::ZERO, |acc, &c| ctx.add(ctx.mul(acc, x), c))
    }

    pub fn add_constant(&self, ctx: &FieldCtx, c: FieldElement) -> Self {
        let mut coeffs = self.coeffs.clone();
        if coeffs.is_empty() {
            coeffs.push(FieldElement::ZERO);
        }
        coeffs[0] = ctx.add(coeffs[0], c);
        UniPoly::new(coeffs)
    }

    pub fn scale(&self, ctx: &FieldCtx, c: FieldElement) -> Self {
        UniPoly::new(self.coeffs.iter().map(|&a| ctx.mul(a, c)).collect())
    }

    pub fn derivative(&self, ctx: &FieldCtx) -> Self {
        UniPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| ctx.scale(c, i as u64))
                .collect(),
        )
    }

    /// The same polynomial in variable `var` of an `n`-variate ring.
    pub fn to_sparse(&self, ctx: &FieldCtx, n: usize, var: usize) -> SparsePoly {
        let terms = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, &c)| {
                let mut e = vec![0u32; n];
                e[var] = i as u32;
                Term { c, e }
            })
            .collect();
        SparsePoly::from_terms(ctx, n, terms).expect("distinct monomials")
    }
}

/// One monomial `c * X^e`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Term {
    pub c: FieldElement,
    pub e: Vec<u32>,
}

impl Term {
    pub fn degree(&self) -> u64 {
        self.e.iter().map(|&x| x as u64).sum()
    }
}

fn grlex(a: &[u32], b: &[u32]) -> Ordering {
    let da: u64 = a.iter().map(|&x| x as u64).sum();
    let db: u64 = b.iter().map(|&x| x as u64).sum();
    da.cmp(&db).then_with(|| a.cmp(b))
}

/// Sparse polynomial in `n` variables. Terms are kept in descending
/// graded-lexicographic order with distinct exponents and nonzero
/// coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SparsePoly {
    n: usize,
    terms: Vec<Term>,
}

impl SparsePoly {
    pub fn zero(n: usize) -> Self {
        SparsePoly {
            n,
            terms: Vec::new(),
        }
    }

    pub fn constant(n: usize, c: FieldElement) -> Self {
        let terms = if c.is_zero() {
            Vec::new()
        } else {
            vec![Term { c, e: vec![0; n] }]
        };
        SparsePoly { n, terms }
    }

    pub fn variable(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        SparsePoly {
            n,
            terms: vec![Term {
                c: FieldElement::ONE,
                e,
            }],
        }
    }

    /// Builds a canonical polynomial, merging repeated monomials.
    pub fn from_terms(ctx: &FieldCtx, n: usize, terms: Vec<Term>) -> Result<Self> {
        let mut acc: HashMap<Vec<u32>, FieldElement> = HashMap::with_capacity(terms.len());
        for t in terms {
            if t.e.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: t.e.len(),
                });
            }
            if t.c.index() >= ctx.q() {
                return Err(Error::InvalidInput(format!(
                    "coefficient {} out of range for q = {}",
                    t.c,
                    ctx.q()
                )));
            }
            let slot = acc.entry(t.e).or_insert(FieldElement::ZERO);
            *slot = ctx.add(*slot, t.c);
        }
        Ok(Self::from_map(n, acc))
    }

    fn from_map(n: usize, acc: HashMap<Vec<u32>, FieldElement>) -> Self {
        let mut terms: Vec<Term> = acc
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(e, c)| Term { c, e })
            .collect();
        terms.sort_by(|a, b| grlex(&b.e, &a.e));
        SparsePoly { n, terms }
    }

    /// Re-validates a deserialized value.
    pub fn normalized(&self, ctx: &FieldCtx) -> Result<Self> {
        Self::from_terms(ctx, self.n, self.terms.clone())
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u64> {
        self.terms.first().map(Term::degree)
    }

    pub fn is_constant(&self) -> bool {
        self.degree().is_none_or(|d| d == 0)
    }

    /// Constant coefficient when the polynomial is constant.
    pub fn as_constant(&self) -> Option<FieldElement> {
        match self.terms.as_slice() {
            [] => Some(FieldElement::ZERO),
            [t] if t.degree() == 0 => Some(t.c),
            _ => None,
        }
    }

    pub fn is_homogeneous(&self) -> bool {
        match self.degree() {
            None => true,
            Some(d) => self.terms.iter().all(|t| t.degree() == d),
        }
    }

    pub fn add(&self, ctx: &FieldCtx, other: &SparsePoly) -> Result<Self> {
        self.check_dims(other)?;
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Self::from_terms(ctx, self.n, terms)
    }

    pub fn neg(&self, ctx: &FieldCtx) -> Self {
        SparsePoly {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    c: ctx.neg(t.c),
                    e: t.e.clone(),
                })
                .collect(),
        }
    }

    pub fn sub(&self, ctx: &FieldCtx, other: &SparsePoly) -> Result<Self> {
        self.add(ctx, &other.neg(ctx))
    }

    pub fn scale(&self, ctx: &FieldCtx, c: FieldElement) -> Self {
        if c.is_zero() {
            return SparsePoly::zero(self.n);
        }
        SparsePoly {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    c: ctx.mul(t.c, c),
                    e: t.e.clone(),
                })
                .collect(),
        }
    }

    pub fn mul(&self, ctx: &FieldCtx, other: &SparsePoly) -> Result<Self> {
        self.check_dims(other)?;
        let mut acc: HashMap<Vec<u32>, FieldElement> = HashMap::new();
        for a in &self.terms {
            for b in &other.terms {
                let e: Vec<u32> = a.e.iter().zip(&b.e).map(|(x, y)| x + y).collect();
                let c = ctx.mul(a.c, b.c);
                let slot = acc.entry(e).or_insert(FieldElement::ZERO);
                *slot = ctx.add(*slot, c);
                if acc.len() > TERM_CAP {
                    return Err(Error::TermCap(TERM_CAP));
                }
            }
        }
        Ok(Self::from_map(self.n, acc))
    }

    pub fn pow(&self, ctx: &FieldCtx, mut e: u32) -> Result<Self> {
        let mut acc = SparsePoly::constant(self.n, FieldElement::ONE);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(ctx, &base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(ctx, &base)?;
            }
        }
        Ok(acc)
    }

    fn check_dims(&self, other: &SparsePoly) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: other.n,
            });
        }
        Ok(())
    }

    pub fn eval(&self, ctx: &FieldCtx, x: &[FieldElement]) -> Result<FieldElement> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        let mut acc = FieldElement::ZERO;
        for t in &self.terms {
            let mut v = t.c;
            for (&xi, &ei) in x.iter().zip(&t.e) {
                if ei != 0 {
                    v = ctx.mul(v, ctx.pow(xi, ei as u64));
                }
            }
            acc = ctx.add(acc, v);
        }
        Ok(acc)
    }

    /// Formal partial derivative in variable `i`.
    pub fn partial(&self, ctx: &FieldCtx, i: usize) -> Self {
        let terms: Vec<Term> = self
            .terms
            .iter()
            .filter(|t| t.e[i] > 0)
            .filter_map(|t| {
                let c = ctx.scale(t.c, t.e[i] as u64);
                if c.is_zero() {
                    return None;
                }
                let mut e = t.e.clone();
                e[i] -= 1;
                Some(Term { c, e })
            })
            .collect();
        // Distinct exponents stay distinct after decrementing one slot.
        let mut p = SparsePoly { n: self.n, terms };
        p.terms.sort_by(|a, b| grlex(&b.e, &a.e));
        p
    }

    pub fn gradient(&self, ctx: &FieldCtx) -> Vec<SparsePoly> {
        (0..self.n).map(|i| self.partial(ctx, i)).collect()
    }

    /// Terms of maximal total degree.
    pub fn top_degree_component(&self) -> Result<Self> {
        let d = self.degree().ok_or(Error::ZeroPolynomial)?;
        Ok(SparsePoly {
            n: self.n,
            terms: self
                .terms
                .iter()
                .take_while(|t| t.degree() == d)
                .cloned()
                .collect(),
        })
    }

    /// Homogenization with the new variable `X_0` placed at index 0.
    pub fn homogenize(&self) -> Result<Self> {
        let d = self.degree().ok_or(Error::ZeroPolynomial)?;
        let terms: Vec<Term> = self
            .terms
            .iter()
            .map(|t| {
                let mut e = Vec::with_capacity(self.n + 1);
                e.push((d - t.degree()) as u32);
                e.extend_from_slice(&t.e);
                Term { c: t.c, e }
            })
            .collect();
        let mut p = SparsePoly {
            n: self.n + 1,
            terms,
        };
        p.terms.sort_by(|a, b| grlex(&b.e, &a.e));
        Ok(p)
    }

    /// If the top-degree part is exactly `X_1^e + ... + X_n^e`, returns `e`.
    pub fn diagonal_top_degree(&self) -> Option<u32> {
        let top = self.top_degree_component().ok()?;
        let e = top.degree()? as u32;
        if e == 0 || top.terms.len() != self.n {
            return None;
        }
        let mut hit = vec![false; self.n];
        for t in &top.terms {
            if t.c != FieldElement::ONE {
                return None;
            }
            let nz: Vec<usize> = (0..self.n).filter(|&i| t.e[i] != 0).collect();
            match nz.as_slice() {
                [i] if t.e[*i] == e && !hit[*i] => hit[*i] = true,
                _ => return None,
            }
        }
        Some(e)
    }
}

/// `P_m = X_1^m + ... + X_n^m`.
pub fn power_sum(n: usize, m: u32) -> SparsePoly {
    assert!(m >= 1, "power sums need m >= 1");
    let mut terms: Vec<Term> = (0..n)
        .map(|i| {
            let mut e = vec![0; n];
            e[i] = m;
            Term {
                c: FieldElement::ONE,
                e,
            }
        })
        .collect();
    terms.sort_by(|a, b| grlex(&b.e, &a.e));
    SparsePoly { n, terms }
}

/// A polynomial in `Y_1..Y_d` graded by `wt(Y_j) = m_j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightedPoly {
    pub weights: Vec<u32>,
    #[serde(flatten)]
    pub inner: SparsePoly,
}

impl WeightedPoly {
    pub fn new(weights: Vec<u32>, inner: SparsePoly) -> Result<Self> {
        if weights.len() != inner.nvars() {
            return Err(Error::DimensionMismatch {
                expected: weights.len(),
                got: inner.nvars(),
            });
        }
        if weights.is_empty() || weights[0] == 0 || weights.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput(
                "weights must be positive and strictly increasing".into(),
            ));
        }
        Ok(WeightedPoly { weights, inner })
    }

    /// `f = Y_1` with weight `m`.
    pub fn linear(m: u32) -> Self {
        WeightedPoly {
            weights: vec![m],
            inner: SparsePoly::variable(1, 0),
        }
    }

    pub fn d(&self) -> usize {
        self.weights.len()
    }

    pub fn term_weight(&self, t: &Term) -> u64 {
        t.e.iter()
            .zip(&self.weights)
            .map(|(&a, &m)| a as u64 * m as u64)
            .sum()
    }

    pub fn weight(&self) -> Result<u64> {
        self.inner
            .terms()
            .iter()
            .map(|t| self.term_weight(t))
            .max()
            .ok_or(Error::ZeroPolynomial)
    }

    /// All terms of maximal weight.
    pub fn top_weight_component(&self) -> Result<Self> {
        let w = self.weight()?;
        let terms = self
            .inner
            .terms()
            .iter()
            .filter(|t| self.term_weight(t) == w)
            .cloned()
            .collect();
        Ok(WeightedPoly {
            weights: self.weights.clone(),
            inner: SparsePoly {
                n: self.inner.n,
                terms,
            },
        })
    }

    /// Checks `char(F_q)` does not divide any weight.
    pub fn check_char(&self, ctx: &FieldCtx) -> Result<()> {
        for &m in &self.weights {
            if ctx.char_divides(m as u64) {
                return Err(Error::HypothesisViolation(format!(
                    "char(F_q) = {} divides m = {m}",
                    ctx.p()
                )));
            }
        }
        Ok(())
    }
}

/// `f(P_{m_1}, ..., P_{m_d})` expanded in `n` variables.
pub fn compose_powersums(ctx: &FieldCtx, f: &WeightedPoly, n: usize) -> Result<SparsePoly> {
    f.check_char(ctx)?;
    compose_unchecked(ctx, f, n)
}

fn compose_unchecked(ctx: &FieldCtx, f: &WeightedPoly, n: usize) -> Result<SparsePoly> {
    let sums: Vec<SparsePoly> = f.weights.iter().map(|&m| power_sum(n, m)).collect();
    let mut cache: HashMap<(usize, u32), SparsePoly> = HashMap::new();
    let mut acc: HashMap<Vec<u32>, FieldElement> = HashMap::new();
    for t in f.inner.terms() {
        let mut prod = SparsePoly::constant(n, t.c);
        for (j, &a) in t.e.iter().enumerate() {
            if a == 0 {
                continue;
            }
            let pw = match cache.get(&(j, a)) {
                Some(p) => p.clone(),
                None => {
                    let p = sums[j].pow(ctx, a)?;
                    cache.insert((j, a), p.clone());
                    p
                }
            };
            prod = prod.mul(ctx, &pw)?;
        }
        for term in prod.terms {
            let slot = acc.entry(term.e).or_insert(FieldElement::ZERO);
            *slot = ctx.add(*slot, term.c);
            if acc.len() > TERM_CAP {
                return Err(Error::TermCap(TERM_CAP));
            }
        }
    }
    Ok(SparsePoly::from_map(n, acc))
}

/// `R_g = f(P_{m_1}, ..., P_{m_d}) + g`. When the top part of `g` is
/// `X_1^e + ... + X_n^e`, `char(F_q)` must not divide `e` either.
pub fn build_rg(ctx: &FieldCtx, f: &WeightedPoly, g: &SparsePoly) -> Result<SparsePoly> {
    f.check_char(ctx)?;
    if let Some(e) = g.diagonal_top_degree() {
        if ctx.char_divides(e as u64) {
            return Err(Error::HypothesisViolation(format!(
                "char(F_q) = {} divides e = {e}",
                ctx.p()
            )));
        }
    }
    compose_unchecked(ctx, f, g.nvars())?.add(ctx, g)
}

/// Top-degree part of `R_g` as predicted from `f^wt` and the diagonal part
/// of `g` (three cases by comparing `e` with `wt(f)`); constant `g` gives
/// `f^wt(P)`. `None` if `g` has neither shape.
pub fn predicted_top_component(
    ctx: &FieldCtx,
    f: &WeightedPoly,
    g: &SparsePoly,
) -> Result<Option<SparsePoly>> {
    let n = g.nvars();
    let top_f = compose_unchecked(ctx, &f.top_weight_component()?, n)?;
    if g.is_constant() {
        return Ok(Some(top_f));
    }
    let Some(e) = g.diagonal_top_degree() else {
        return Ok(None);
    };
    let w = f.weight()?;
    let pe = power_sum(n, e);
    Ok(Some(match (e as u64).cmp(&w) {
        Ordering::Less => top_f,
        Ordering::Equal => top_f.add(ctx, &pe)?,
        Ordering::Greater => pe,
    }))
}

/// `D_d(X, a) = sum_{i <= d/2} d/(d-i) C(d-i, i) (-a)^i X^{d-2i}`.
pub fn dickson(ctx: &FieldCtx, d: u32, a: FieldElement) -> UniPoly {
    let mut coeffs = vec![FieldElement::ZERO; d as usize + 1];
    let p = BigUint::from(ctx.p());
    let minus_a = ctx.neg(a);
    for i in 0..=d / 2 {
        let c = dickson_integer_coeff(d, i);
        let r = (c % &p).to_u64().expect("reduced below p");
        let term = ctx.mul(ctx.from_int(r as i64), ctx.pow(minus_a, i as u64));
        coeffs[(d - 2 * i) as usize] = term;
    }
    UniPoly::new(coeffs)
}

/// The integer `d/(d-i) * C(d-i, i)`, exact.
pub fn dickson_integer_coeff(d: u32, i: u32) -> BigUint {
    assert!(2 * i <= d && d >= 1);
    let (d, i) = (d as u64, i as u64);
    let mut binom = BigUint::one();
    for j in 0..i {
        binom = binom * BigUint::from(d - i - j) / BigUint::from(j + 1);
    }
    let num = binom * BigUint::from(d);
    let den = BigUint::from(d - i);
    debug_assert!((&num % &den) == BigUint::from(0u32));
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;

    fn el(f: &FieldCtx, i: i64) -> FieldElement {
        f.from_int(i)
    }

    fn sp(f: &FieldCtx, n: usize, terms: &[(i64, &[u32])]) -> SparsePoly {
        SparsePoly::from_terms(
            f,
            n,
            terms
                .iter()
                .map(|(c, e)| Term {
                    c: el(f, *c),
                    e: e.to_vec(),
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn power_sum_examples() {
        let f3 = FieldCtx::prime(3).unwrap();
        assert_eq!(power_sum(2, 2), sp(&f3, 2, &[(1, &[2, 0]), (1, &[0, 2])]));
        let f5 = FieldCtx::prime(5).unwrap();
        assert_eq!(
            power_sum(3, 1),
            sp(&f5, 3, &[(1, &[1, 0, 0]), (1, &[0, 1, 0]), (1, &[0, 0, 1])])
        );
        assert_eq!(power_sum(1, 4), sp(&f5, 1, &[(1, &[4])]));
    }

    #[test]
    fn weight_examples() {
        let f5 = FieldCtx::prime(5).unwrap();
        let f = WeightedPoly::new(vec![2, 3], sp(&f5, 2, &[(1, &[2, 1]), (1, &[0, 1])])).unwrap();
        assert_eq!(f.weight().unwrap(), 7);
        assert_eq!(
            f.top_weight_component().unwrap().inner,
            sp(&f5, 2, &[(1, &[2, 1])])
        );
        let g = WeightedPoly::new(vec![2, 3], sp(&f5, 2, &[(1, &[3, 0]), (1, &[0, 2])])).unwrap();
        assert_eq!(g.weight().unwrap(), 6);
        assert_eq!(g.top_weight_component().unwrap(), g);
        let c = WeightedPoly::new(vec![2], SparsePoly::constant(1, el(&f5, 3))).unwrap();
        assert_eq!(c.weight().unwrap(), 0);
        let z = WeightedPoly::new(vec![2], SparsePoly::zero(1)).unwrap();
        assert_eq!(z.weight(), Err(Error::ZeroPolynomial));
    }

    #[test]
    fn compose_examples() {
        let f3 = FieldCtx::prime(3).unwrap();
        let r = build_rg(
            &f3,
            &WeightedPoly::linear(2),
            &SparsePoly::constant(2, el(&f3, -1)),
        )
        .unwrap();
        assert_eq!(r, sp(&f3, 2, &[(1, &[2, 0]), (1, &[0, 2]), (-1, &[0, 0])]));

        let f5 = FieldCtx::prime(5).unwrap();
        let f = WeightedPoly::new(vec![2], sp(&f5, 1, &[(1, &[2])])).unwrap();
        let r = compose_powersums(&f5, &f, 2).unwrap();
        assert_eq!(
            r,
            sp(&f5, 2, &[(1, &[4, 0]), (2, &[2, 2]), (1, &[0, 4])])
        );

        let g = sp(&f3, 2, &[(1, &[3, 0]), (1, &[0, 3])]);
        assert!(matches!(
            build_rg(&f3, &WeightedPoly::linear(2), &g),
            Err(Error::HypothesisViolation(_))
        ));
        assert!(matches!(
            compose_powersums(&f3, &WeightedPoly::linear(3), 2),
            Err(Error::HypothesisViolation(_))
        ));
    }

    #[test]
    fn top_and_homogenize_examples() {
        let f3 = FieldCtx::prime(3).unwrap();
        let r = sp(&f3, 2, &[(1, &[2, 0]), (1, &[0, 2]), (-1, &[0, 0])]);
        assert_eq!(
            r.top_degree_component().unwrap(),
            sp(&f3, 2, &[(1, &[2, 0]), (1, &[0, 2])])
        );
        assert_eq!(
            r.homogenize().unwrap(),
            sp(&f3, 3, &[(1, &[0, 2, 0]), (1, &[0, 0, 2]), (-1, &[2, 0, 0])])
        );
        let h = sp(&f3, 2, &[(1, &[2, 0]), (1, &[1, 1])]);
        assert_eq!(h.top_degree_component().unwrap(), h);
        assert_eq!(SparsePoly::zero(2).homogenize(), Err(Error::ZeroPolynomial));

        // e = 3 > wt(f) = 2: top part is X_1^3 (g has one variable here).
        let f5 = FieldCtx::prime(5).unwrap();
        let g = sp(&f5, 1, &[(1, &[3])]);
        let r = build_rg(&f5, &WeightedPoly::linear(2), &g).unwrap();
        assert_eq!(r.top_degree_component().unwrap(), g);
        assert_eq!(
            predicted_top_component(&f5, &WeightedPoly::linear(2), &g)
                .unwrap()
                .unwrap(),
            g
        );
    }

    #[test]
    fn dickson_examples() {
        let f7 = FieldCtx::prime(7).unwrap();
        for a in f7.elements() {
            let two_a = f7.scale(a, 2);
            let three_a = f7.scale(a, 3);
            assert_eq!(
                dickson(&f7, 2, a),
                UniPoly::new(vec![f7.neg(two_a), f7.zero(), f7.one()])
            );
            assert_eq!(
                dickson(&f7, 3, a),
                UniPoly::new(vec![f7.zero(), f7.neg(three_a), f7.zero(), f7.one()])
            );
            assert_eq!(dickson(&f7, 1, a), UniPoly::new(vec![f7.zero(), f7.one()]));
        }
        // Integer coefficients of D_10: 1, 10, 35, 50, 25, 2.
        let c: Vec<u64> = (0..=5)
            .map(|i| dickson_integer_coeff(10, i).to_u64().unwrap())
            .collect();
        assert_eq!(c, vec![1, 10, 35, 50, 25, 2]);
    }

    #[test]
    fn dickson_functional_equation() {
        for q in [4u64, 5, 7, 8, 9, 11, 16, 25, 27, 32, 49, 64] {
            let f = FieldCtx::from_q(q).unwrap();
            for d in 1..=9 {
                for a in f.elements().step_by(((q / 6) as usize).max(1)) {
                    let dp = dickson(&f, d, a);
                    for x in f.nonzero_elements() {
                        let y = f.mul(a, f.inv(x).unwrap());
                        let lhs = dp.eval(&f, f.add(x, y));
                        let rhs = f.add(f.pow(x, d as u64), f.pow(y, d as u64));
                        assert_eq!(lhs, rhs, "q={q} d={d} a={a} x={x}");
                    }
                }
            }
        }
    }

    #[test]
    fn eval_and_gradient_examples() {
        let f3 = FieldCtx::prime(3).unwrap();
        let p = sp(&f3, 2, &[(1, &[2, 0]), (1, &[0, 2])]);
        assert_eq!(p.eval(&f3, &[el(&f3, 1), el(&f3, 2)]).unwrap(), el(&f3, 2));
        assert!(matches!(
            p.eval(&f3, &[el(&f3, 1)]),
            Err(Error::DimensionMismatch { .. })
        ));
        let f5 = FieldCtx::prime(5).unwrap();
        let r = sp(&f5, 2, &[(1, &[2, 0]), (1, &[0, 2]), (-1, &[0, 0])]);
        assert_eq!(
            r.gradient(&f5),
            vec![sp(&f5, 2, &[(2, &[1, 0])]), sp(&f5, 2, &[(2, &[0, 1])])]
        );
        let cube = sp(&f3, 1, &[(1, &[3])]);
        assert_eq!(cube.gradient(&f3), vec![SparsePoly::zero(1)]);
    }

    #[test]
    fn homogenize_then_dehomogenize() {
        let f = FieldCtx::from_q(4).unwrap();
        let p = sp(&f, 2, &[(1, &[3, 0]), (3, &[1, 1]), (2, &[0, 1]), (1, &[0, 0])]);
        let h = p.homogenize().unwrap();
        assert!(h.is_homogeneous());
        for x in f.elements() {
            for y in f.elements() {
                assert_eq!(
                    h.eval(&f, &[f.one(), x, y]).unwrap(),
                    p.eval(&f, &[x, y]).unwrap()
                );
            }
        }
    }

    #[test]
    fn diagonal_top_detection() {
        let f5 = FieldCtx::prime(5).unwrap();
        let g = sp(&f5, 2, &[(1, &[3, 0]), (1, &[0, 3]), (2, &[1, 1])]);
        assert_eq!(g.diagonal_top_degree(), Some(3));
        let g2 = sp(&f5, 2, &[(2, &[3, 0]), (1, &[0, 3])]);
        assert_eq!(g2.diagonal_top_degree(), None);
        let g3 = sp(&f5, 2, &[(1, &[3, 0])]);
        assert_eq!(g3.diagonal_top_degree(), None);
    }

    #[test]
    fn json_shapes() {
        let f5 = FieldCtx::prime(5).unwrap();
        let p = sp(&f5, 2, &[(1, &[2, 0]), (4, &[0, 0])]);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"n":2,"terms":[{"c":1,"e":[2,0]},{"c":4,"e":[0,0]}]}"#);
        let back: SparsePoly = serde_json::from_str(&s).unwrap();
        assert_eq!(back.normalized(&f5).unwrap(), p);
        let u = UniPoly::from_indices(&f5, &[0, 0, 1]).unwrap();
        assert_eq!(serde_json::to_string(&u).unwrap(), r#"{"coeffs":[0,0,1]}"#);
        let w = WeightedPoly::linear(2);
        let ws = serde_json::to_string(&w).unwrap();
        assert_eq!(ws, r#"{"weights":[2],"n":1,"terms":[{"c":1,"e":[1]}]}"#);
    }
}
