//! Arithmetic in `F_q`, `q = p^k`.
//!
//! Elements are stored as their canonical index: the base-`p` digits of the
//! index are the coefficients (low to high) of the element in the polynomial
//! basis `1, t, ..., t^{k-1}` where `t` is a root of the field modulus. With
//! this encoding addition is digitwise, so the additive group is `(Z/p)^k`
//! in index space, which is what the convolution counters rely on.

use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{Error, Result};

/// Largest `q` for which exp/log tables are built.
pub const TABLE_LIMIT: u64 = 1 << 20;
/// Largest `q` accepted at all.
pub const FIELD_LIMIT: u64 = 1 << 40;

/// An element of `F_q`, identified by its canonical index in `[0, q)`.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct FieldElement(u64);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    #[inline]
    pub fn index(self) -> u64 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl std::fmt::Display for FieldElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// JSON form of a field: `{"p": 3, "k": 2, "modulus": [1, 0, 1]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u64,
    #[serde(default = "default_k")]
    pub k: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<Vec<u64>>,
}

fn default_k() -> u32 {
    1
}

impl FieldSpec {
    pub fn prime(p: u64) -> Self {
        FieldSpec {
            p,
            k: 1,
            modulus: None,
        }
    }

    /// Spec for `F_q` with the default modulus; `q` must be a prime power.
    pub fn from_q(q: u64) -> Result<Self> {
        let (p, k) = arith::prime_power(q)
            .ok_or_else(|| Error::InvalidInput(format!("{q} is not a prime power")))?;
        Ok(FieldSpec {
            p,
            k,
            modulus: None,
        })
    }
}

#[derive(Debug, Clone)]
struct Tables {
    // exp has length 2(q-1) so that exp[log a + log b] needs no reduction.
    exp: Vec<u32>,
    log: Vec<u32>,
}

/// Validated field context. Immutable after construction.
#[derive(Debug, Clone)]
pub struct FieldCtx {
    p: u64,
    k: u32,
    q: u64,
    modulus: Vec<u64>,
    tables: Option<Tables>,
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.k == other.k && self.modulus == other.modulus
    }
}

impl Eq for FieldCtx {}

impl FieldCtx {
    /// Builds `F_{p^k}`. When `modulus` is `None` the lexicographically
    /// smallest monic irreducible of degree `k` is used (coefficients compared
    /// from the constant term upwards). Tables are built when `q <= 2^20`.
    pub fn new(p: u64, k: u32, modulus: Option<&[u64]>) -> Result<Self> {
        Self::build(p, k, modulus, TableMode::Auto)
    }

    /// Like [`FieldCtx::new`] but fails with `TooLarge` instead of falling
    /// back to polynomial arithmetic.
    pub fn with_tables(p: u64, k: u32, modulus: Option<&[u64]>) -> Result<Self> {
        Self::build(p, k, modulus, TableMode::Required)
    }

    /// Polynomial arithmetic only, regardless of size.
    pub fn without_tables(p: u64, k: u32, modulus: Option<&[u64]>) -> Result<Self> {
        Self::build(p, k, modulus, TableMode::Off)
    }

    pub fn prime(p: u64) -> Result<Self> {
        Self::new(p, 1, None)
    }

    pub fn from_spec(spec: &FieldSpec) -> Result<Self> {
        Self::new(spec.p, spec.k, spec.modulus.as_deref())
    }

    pub fn from_q(q: u64) -> Result<Self> {
        Self::from_spec(&FieldSpec::from_q(q)?)
    }

    fn build(p: u64, k: u32, modulus: Option<&[u64]>, mode: TableMode) -> Result<Self> {
        if !arith::is_prime(p) {
            return Err(Error::NonPrime(p));
        }
        if k == 0 {
            return Err(Error::InvalidModulus("extension degree must be >= 1".into()));
        }
        let q = (p as u128).checked_pow(k).unwrap_or(u128::MAX);
        if q > FIELD_LIMIT as u128 {
            return Err(Error::TooLarge(format!("q = {p}^{k}")));
        }
        let q = q as u64;
        if mode == TableMode::Required && q > TABLE_LIMIT {
            return Err(Error::TooLarge(format!("q = {q} for table mode")));
        }
        let modulus = match modulus {
            Some(m) => {
                if m.len() != k as usize + 1 {
                    return Err(Error::InvalidModulus(format!(
                        "expected {} coefficients, got {}",
                        k + 1,
                        m.len()
                    )));
                }
                if m[k as usize] != 1 {
                    return Err(Error::InvalidModulus("modulus must be monic".into()));
                }
                if m.iter().any(|&c| c >= p) {
                    return Err(Error::InvalidModulus(format!(
                        "coefficients must lie in [0, {p})"
                    )));
                }
                if !is_irreducible(m, p) {
                    return Err(Error::Reducible(m.to_vec()));
                }
                m.to_vec()
            }
            None => smallest_irreducible(p, k),
        };
        let mut ctx = FieldCtx {
            p,
            k,
            q,
            modulus,
            tables: None,
        };
        if mode != TableMode::Off && q <= TABLE_LIMIT {
            ctx.tables = Some(ctx.build_tables());
        }
        Ok(ctx)
    }

    fn build_tables(&self) -> Tables {
        let q = self.q;
        let order = q - 1;
        let g = self.find_primitive();
        let mut exp = Vec::with_capacity(2 * order as usize);
        let mut x = FieldElement::ONE;
        for _ in 0..order {
            exp.push(x.0 as u32);
            x = self.mul_poly(x, g);
        }
        debug_assert_eq!(x, FieldElement::ONE);
        for i in 0..order as usize {
            exp.push(exp[i]);
        }
        let mut log = vec![0u32; q as usize];
        for (i, &e) in exp.iter().take(order as usize).enumerate() {
            log[e as usize] = i as u32;
        }
        Tables { exp, log }
    }

    fn find_primitive(&self) -> FieldElement {
        let order = self.q - 1;
        if order == 1 {
            return FieldElement::ONE;
        }
        let factors = arith::factorize(order);
        // Try t itself first: when the modulus is primitive this is the answer.
        let first = if self.k > 1 { self.p } else { 2 };
        let candidates = std::iter::once(first).chain(1..self.q);
        for c in candidates {
            let g = FieldElement(c);
            if g.is_zero() {
                continue;
            }
            if factors
                .iter()
                .all(|&(r, _)| self.pow_slow(g, order / r) != FieldElement::ONE)
            {
                return g;
            }
        }
        unreachable!("F_q^* is cyclic")
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn k(&self) -> u32 {
        self.k
    }

    #[inline]
    pub fn q(&self) -> u64 {
        self.q
    }

    /// Monic modulus, coefficients low to high (length `k + 1`).
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn has_tables(&self) -> bool {
        self.tables.is_some()
    }

    pub fn spec(&self) -> FieldSpec {
        FieldSpec {
            p: self.p,
            k: self.k,
            modulus: Some(self.modulus.clone()),
        }
    }

    /// `true` iff `char(F_q)` divides `m`.
    pub fn char_divides(&self, m: u64) -> bool {
        m.is_multiple_of(self.p)
    }

    #[inline]
    pub fn zero(&self) -> FieldElement {
        FieldElement::ZERO
    }

    #[inline]
    pub fn one(&self) -> FieldElement {
        FieldElement::ONE
    }

    /// Element with canonical index `i`.
    pub fn elem(&self, i: u64) -> Result<FieldElement> {
        if i < self.q {
            Ok(FieldElement(i))
        } else {
            Err(Error::InvalidInput(format!(
                "element index {i} out of range for q = {}",
                self.q
            )))
        }
    }

    /// Element with canonical index `i`; caller guarantees `i < q`.
    #[inline]
    pub fn elem_unchecked(&self, i: u64) -> FieldElement {
        debug_assert!(i < self.q);
        FieldElement(i)
    }

    /// Image of the integer `n` under `Z -> F_p -> F_q`.
    pub fn from_int(&self, n: i64) -> FieldElement {
        FieldElement(n.rem_euclid(self.p as i64) as u64)
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + Clone {
        (0..self.q).map(FieldElement)
    }

    pub fn nonzero_elements(&self) -> impl Iterator<Item = FieldElement> + Clone {
        (1..self.q).map(FieldElement)
    }

    /// Polynomial-basis coefficients of `a`, low to high.
    pub fn digits(&self, a: FieldElement) -> Vec<u64> {
        let mut v = a.0;
        (0..self.k)
            .map(|_| {
                let d = v % self.p;
                v /= self.p;
                d
            })
            .collect()
    }

    pub fn from_digits(&self, digits: &[u64]) -> Result<FieldElement> {
        if digits.len() != self.k as usize {
            return Err(Error::DimensionMismatch {
                expected: self.k as usize,
                got: digits.len(),
            });
        }
        let mut idx = 0u64;
        for &d in digits.iter().rev() {
            if d >= self.p {
                return Err(Error::InvalidInput(format!("digit {d} >= p")));
            }
            idx = idx * self.p + d;
        }
        Ok(FieldElement(idx))
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if self.k == 1 {
            return FieldElement(arith::add_mod(a.0, b.0, self.p));
        }
        if self.p == 2 {
            return FieldElement(a.0 ^ b.0);
        }
        let p = self.p;
        let (mut x, mut y) = (a.0, b.0);
        let mut out = 0u64;
        let mut place = 1u64;
        while x != 0 || y != 0 {
            let d = arith::add_mod(x % p, y % p, p);
            out += d * place;
            place *= p;
            x /= p;
            y /= p;
        }
        FieldElement(out)
    }

    #[inline]
    pub fn neg(&self, a: FieldElement) -> FieldElement {
        if self.k == 1 {
            return FieldElement(if a.0 == 0 { 0 } else { self.p - a.0 });
        }
        if self.p == 2 {
            return a;
        }
        let p = self.p;
        let mut x = a.0;
        let mut out = 0u64;
        let mut place = 1u64;
        while x != 0 {
            let d = x % p;
            if d != 0 {
                out += (p - d) * place;
            }
            place *= p;
            x /= p;
        }
        FieldElement(out)
    }

    #[inline]
    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    /// `m * a` for an integer `m` (repeated addition).
    pub fn scale(&self, a: FieldElement, m: u64) -> FieldElement {
        let s = m % self.p;
        if s == 0 || a.is_zero() {
            return FieldElement::ZERO;
        }
        if s == 1 {
            return a;
        }
        if self.k == 1 {
            return FieldElement(arith::mul_mod(a.0, s, self.p));
        }
        let p = self.p;
        let mut x = a.0;
        let mut out = 0u64;
        let mut place = 1u64;
        while x != 0 {
            out += arith::mul_mod(x % p, s, p) * place;
            place *= p;
            x /= p;
        }
        FieldElement(out)
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.is_zero() || b.is_zero() {
            return FieldElement::ZERO;
        }
        if self.k == 1 {
            return FieldElement(arith::mul_mod(a.0, b.0, self.p));
        }
        match &self.tables {
            Some(t) => {
                let i = t.log[a.0 as usize] as usize + t.log[b.0 as usize] as usize;
                FieldElement(t.exp[i] as u64)
            }
            None => self.mul_poly(a, b),
        }
    }

    fn mul_poly(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if self.k == 1 {
            return FieldElement(arith::mul_mod(a.0, b.0, self.p));
        }
        let p = self.p;
        let k = self.k as usize;
        let da = self.digits(a);
        let db = self.digits(b);
        let mut prod = vec![0u64; 2 * k - 1];
        for (i, &x) in da.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = arith::add_mod(prod[i + j], arith::mul_mod(x, y, p), p);
            }
        }
        for top in (k..prod.len()).rev() {
            let c = prod[top];
            if c == 0 {
                continue;
            }
            prod[top] = 0;
            for (j, &mj) in self.modulus[..k].iter().enumerate() {
                let idx = top - k + j;
                prod[idx] = arith::sub_mod(prod[idx], arith::mul_mod(c, mj, p), p);
            }
        }
        let mut idx = 0u64;
        for &d in prod[..k].iter().rev() {
            idx = idx * p + d;
        }
        FieldElement(idx)
    }

    /// Square-and-multiply; the exponent is reduced mod `q - 1` only for a
    /// nonzero base, so `pow(0, 0) = 1` and `pow(0, e) = 0` for `e > 0`.
    pub fn pow(&self, a: FieldElement, e: u64) -> FieldElement {
        if a.is_zero() {
            return if e == 0 {
                FieldElement::ONE
            } else {
                FieldElement::ZERO
            };
        }
        let e = e % (self.q - 1);
        if let Some(t) = &self.tables {
            let l = (t.log[a.0 as usize] as u128 * e as u128) % (self.q - 1) as u128;
            return FieldElement(t.exp[l as usize] as u64);
        }
        self.pow_slow(a, e)
    }

    fn pow_slow(&self, a: FieldElement, mut e: u64) -> FieldElement {
        let mut base = a;
        let mut acc = FieldElement::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_poly(acc, base);
            }
            base = self.mul_poly(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if let Some(t) = &self.tables {
            let l = t.log[a.0 as usize] as u64;
            let i = if l == 0 { 0 } else { self.q - 1 - l };
            return Ok(FieldElement(t.exp[i as usize] as u64));
        }
        Ok(self.pow_slow(a, self.q - 2))
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// Discrete logarithm to the table generator, for `a != 0`. `None` when
    /// the context has no tables or `a = 0`.
    pub fn log(&self, a: FieldElement) -> Option<u64> {
        if a.is_zero() {
            return None;
        }
        self.tables.as_ref().map(|t| t.log[a.0 as usize] as u64)
    }

    /// `g^i` for the table generator `g`.
    pub fn exp(&self, i: u64) -> Option<FieldElement> {
        let order = self.q - 1;
        self.tables
            .as_ref()
            .map(|t| FieldElement(t.exp[(i % order) as usize] as u64))
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum TableMode {
    Auto,
    Required,
    Off,
}

// ---- F_p[X] helpers for modulus validation -------------------------------

fn trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn poly_rem(a: &[u64], f: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    trim(&mut r);
    let df = f.len() - 1;
    let lead_inv = arith::inv_mod_prime(f[df], p);
    while r.len() > df {
        let top = r.len() - 1;
        let c = arith::mul_mod(r[top], lead_inv, p);
        if c != 0 {
            for (j, &fj) in f.iter().enumerate() {
                let idx = top - df + j;
                r[idx] = arith::sub_mod(r[idx], arith::mul_mod(c, fj, p), p);
            }
        }
        trim(&mut r);
    }
    r
}

fn poly_mulmod(a: &[u64], b: &[u64], f: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = arith::add_mod(prod[i + j], arith::mul_mod(x, y, p), p);
        }
    }
    poly_rem(&prod, f, p)
}

fn poly_powmod(base: &[u64], mut e: u64, f: &[u64], p: u64) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut b = poly_rem(base, f, p);
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_mulmod(&acc, &b, f, p);
        }
        b = poly_mulmod(&b, &b, f, p);
        e >>= 1;
    }
    acc
}

fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        let r = poly_rem(&x, &y, p);
        x = y;
        y = r;
    }
    x
}

/// `X^{p^j} mod f` for `j = 0..=k`.
fn frobenius_orbit(f: &[u64], p: u64, k: u32) -> Vec<Vec<u64>> {
    let mut out = Vec::with_capacity(k as usize + 1);
    let mut h = poly_rem(&[0, 1], f, p);
    out.push(h.clone());
    for _ in 0..k {
        h = poly_powmod(&h, p, f, p);
        out.push(h.clone());
    }
    out
}

/// Rabin's test: `f` of degree `k` is irreducible iff `f | X^{p^k} - X` and
/// `gcd(X^{p^{k/r}} - X, f) = 1` for every prime `r | k`.
pub(crate) fn is_irreducible(f: &[u64], p: u64) -> bool {
    let mut f = f.to_vec();
    trim(&mut f);
    if f.len() < 2 {
        return false;
    }
    let k = (f.len() - 1) as u32;
    if k == 1 {
        return true;
    }
    let orbit = frobenius_orbit(&f, p, k);
    let x_minus = |h: &[u64]| -> Vec<u64> {
        let mut d = h.to_vec();
        if d.len() < 2 {
            d.resize(2, 0);
        }
        d[1] = arith::sub_mod(d[1], 1, p);
        trim(&mut d);
        d
    };
    if !x_minus(&orbit[k as usize]).is_empty() {
        return false;
    }
    for (r, _) in arith::factorize(k as u64) {
        let g = poly_gcd(&x_minus(&orbit[(k as u64 / r) as usize]), &f, p);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

fn smallest_irreducible(p: u64, k: u32) -> Vec<u64> {
    let total = p.pow(k);
    // c_0 is the leading digit of t; the block c_0 = 0 holds multiples of X.
    let start = if k > 1 { total / p } else { 0 };
    for t in start..total {
        // c_0 is the most significant digit of t.
        let mut coeffs = vec![0u64; k as usize + 1];
        let mut v = t;
        for j in (0..k as usize).rev() {
            coeffs[j] = v % p;
            v /= p;
        }
        coeffs[k as usize] = 1;
        if is_irreducible(&coeffs, p) {
            return coeffs;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}
