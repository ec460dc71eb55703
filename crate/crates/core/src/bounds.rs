//! Error bounds of the form `(A + B sqrt(q)) / q^s` and exact verdicts.
//!
//! Each estimate is a signed sum of terms `c * q^(j/2)`. Terms with even `j`
//! collect into `A`, odd `j` into `B`; negative exponents are cleared by a
//! common denominator `q^s` (`s = 0` for almost every estimate). Deciding
//! `|N - main| <= bound` only ever squares integers.

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::gcd;
use crate::error::{Error, Result};

pub(crate) mod big_string {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};
    use std::str::FromStr;

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let s = String::deserialize(d)?;
        BigUint::from_str(&s).map_err(serde::de::Error::custom)
    }
}

pub(crate) mod bigint_string {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serializer};
    use std::str::FromStr;

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let s = String::deserialize(d)?;
        BigInt::from_str(&s).map_err(serde::de::Error::custom)
    }
}

/// The real number `(A + B sqrt(q)) / q^scale`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SqrtBound {
    #[serde(rename = "A", with = "big_string")]
    pub a: BigUint,
    #[serde(rename = "B", with = "big_string")]
    pub b: BigUint,
    pub q: u64,
    #[serde(default, skip_serializing_if = "is_zero_u32")]
    pub scale: u32,
}

fn is_zero_u32(x: &u32) -> bool {
    *x == 0
}

fn qpow(q: u64, e: u64) -> BigInt {
    num_traits::pow(BigInt::from(q), e as usize)
}

fn upow(base: u64, e: u64) -> BigInt {
    num_traits::pow(BigInt::from(base), e as usize)
}

/// Signed sum of `c * q^(j/2)` terms.
#[derive(Clone, Debug, Default)]
pub struct HalfPowers {
    terms: Vec<(BigInt, i64)>,
}

impl HalfPowers {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(mut self, c: impl Into<BigInt>, half_exp: i64) -> Self {
        let c = c.into();
        if !c.is_zero() {
            self.terms.push((c, half_exp));
        }
        self
    }

    pub fn finish(self, q: u64) -> Result<SqrtBound> {
        let min = self.terms.iter().map(|t| t.1).min().unwrap_or(0);
        let scale = if min < 0 { ((-min + 1) / 2) as u32 } else { 0 };
        let mut a = BigInt::zero();
        let mut b = BigInt::zero();
        for (c, j) in self.terms {
            let j = (j + 2 * scale as i64) as u64;
            if j.is_multiple_of(2) {
                a += c * qpow(q, j / 2);
            } else {
                b += c * qpow(q, (j - 1) / 2);
            }
        }
        if a.is_negative() || b.is_negative() {
            return Err(Error::InvariantViolation(format!(
                "bound has a negative component: A = {a}, B = {b}"
            )));
        }
        Ok(SqrtBound {
            a: a.to_biguint().expect("non-negative"),
            b: b.to_biguint().expect("non-negative"),
            q,
            scale,
        })
    }
}

/// Sign of `x + y sqrt(q)`.
pub fn sign_sqrt(x: &BigInt, y: &BigInt, q: u64) -> Ordering {
    let sx = x.sign();
    let sy = y.sign();
    match (sx, sy) {
        (Sign::NoSign, _) => y.sign_ord(),
        (_, Sign::NoSign) => x.sign_ord(),
        (Sign::Plus, Sign::Plus) => Ordering::Greater,
        (Sign::Minus, Sign::Minus) => Ordering::Less,
        _ => {
            // Opposite signs: compare x^2 with y^2 q.
            let lhs = x * x;
            let rhs = y * y * BigInt::from(q);
            match lhs.cmp(&rhs) {
                Ordering::Equal => Ordering::Equal,
                Ordering::Greater => x.sign_ord(),
                Ordering::Less => y.sign_ord(),
            }
        }
    }
}

trait SignOrd {
    fn sign_ord(&self) -> Ordering;
}

impl SignOrd for BigInt {
    fn sign_ord(&self) -> Ordering {
        match self.sign() {
            Sign::Minus => Ordering::Less,
            Sign::NoSign => Ordering::Equal,
            Sign::Plus => Ordering::Greater,
        }
    }
}

impl SqrtBound {
    pub fn zero(q: u64) -> Self {
        SqrtBound {
            a: BigUint::zero(),
            b: BigUint::zero(),
            q,
            scale: 0,
        }
    }

    /// `true` iff `|value| <= self` where `value = num / den`, `den > 0`.
    pub fn admits(&self, value: &BigRational) -> bool {
        let num = value.numer().abs();
        let den = value.denom().clone();
        let x = num * qpow(self.q, self.scale as u64);
        let a = BigInt::from(self.a.clone()) * &den;
        if x <= a {
            return true;
        }
        let diff = x - a;
        let b = BigInt::from(self.b.clone()) * den;
        &diff * &diff <= &b * &b * BigInt::from(self.q)
    }

    /// Exact ordering of two bounds for the same `q`.
    pub fn cmp_exact(&self, other: &SqrtBound) -> Ordering {
        assert_eq!(self.q, other.q, "bounds for different q");
        let s = self.scale.max(other.scale);
        let lift = |v: &BigUint, from: u32| BigInt::from(v.clone()) * qpow(self.q, (s - from) as u64);
        let x = lift(&self.a, self.scale) - lift(&other.a, other.scale);
        let y = lift(&self.b, self.scale) - lift(&other.b, other.scale);
        sign_sqrt(&x, &y, self.q)
    }

    /// Floating-point value, for reporting only.
    pub fn to_f64(&self) -> f64 {
        let a = self.a.to_f64().unwrap_or(f64::INFINITY);
        let b = self.b.to_f64().unwrap_or(f64::INFINITY);
        (a + b * (self.q as f64).sqrt()) / (self.q as f64).powi(self.scale as i32)
    }
}

/// Exact rational main term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MainTerm(pub BigRational);

impl MainTerm {
    pub fn value(&self) -> &BigRational {
        &self.0
    }

    pub fn integer(v: impl Into<BigInt>) -> Self {
        MainTerm(BigRational::from_integer(v.into()))
    }

    /// `q^e`.
    pub fn q_power(q: u64, e: u64) -> Self {
        Self::integer(qpow(q, e))
    }

    /// `p_m = q^m + ... + q + 1` (`p_{-1} = 0`).
    pub fn projective(q: u64, m: i64) -> Self {
        let mut acc = BigInt::zero();
        for i in 0..=m {
            acc += qpow(q, i as u64);
        }
        Self::integer(acc)
    }

    /// `((q-1)^n - (-1)^n) / q`, the nonzero-coordinate main term for `a != 0`.
    pub fn mh_nonzero(q: u64, n: u64) -> Self {
        let sign = if n.is_multiple_of(2) { BigInt::one() } else { -BigInt::one() };
        let num = upow(q - 1, n) - sign;
        MainTerm(BigRational::new(num, BigInt::from(q)))
    }

    /// `(q-1)^n / q + (-1)^n (n + 1 - 1/q)`, the nonzero-coordinate main term
    /// for `a = 0`.
    pub fn mh_nonzero_a_zero(q: u64, n: u64) -> Self {
        let qb = BigInt::from(q);
        let first = BigRational::new(upow(q - 1, n), qb.clone());
        let inner = BigRational::new(BigInt::from(n + 1) * &qb - 1, qb);
        let second = if n.is_multiple_of(2) { inner } else { -inner };
        MainTerm(first + second)
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }
}

/// Outcome of an exact bound check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub holds: bool,
    /// `|N - main|`, exact.
    pub delta: BigRational,
    /// `delta / bound` to six decimals (reporting only).
    pub margin: String,
}

pub fn check_bound(n: &BigInt, main: &MainTerm, bound: &SqrtBound) -> Verdict {
    let delta = (BigRational::from_integer(n.clone()) - main.value()).abs();
    check_delta(delta, bound)
}

/// Verdict for an already formed deviation.
pub fn check_delta(delta: BigRational, bound: &SqrtBound) -> Verdict {
    let holds = bound.admits(&delta);
    let d = delta.numer().to_f64().unwrap_or(f64::INFINITY)
        / delta.denom().to_f64().unwrap_or(f64::INFINITY);
    let b = bound.to_f64();
    let margin = if b == 0.0 {
        if delta.is_zero() {
            "0.000000".to_string()
        } else {
            "inf".to_string()
        }
    } else {
        format!("{:.6}", d / b)
    };
    Verdict {
        holds,
        delta,
        margin,
    }
}

// ---- the estimates ----------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TheoremCase {
    /// `e < deg(R_g - g)`
    Lt,
    /// `e = deg(R_g - g)`
    Eq,
    /// `e > deg(R_g - g)`
    Gt,
    /// `g` constant
    GConst,
}

fn check_q(q: u64) -> Result<()> {
    if q < 2 {
        return Err(Error::InvalidInput(format!("q = {q} must be >= 2")));
    }
    Ok(())
}

/// Main estimate for `R_g = f(P_{m_1}, ..., P_{m_d}) + g` with
/// `delta = deg R_g`, one expansion per case.
pub fn bound_theorem_main(q: u64, n: u64, d: u64, delta: u64, case: TheoremCase) -> Result<SqrtBound> {
    check_q(q)?;
    if d < 1 || d + 3 > n {
        return Err(Error::HypothesisViolation(format!(
            "need 1 <= d <= n - 3, got d = {d}, n = {n}"
        )));
    }
    if delta < 1 {
        return Err(Error::HypothesisViolation("deg R_g must be >= 1".into()));
    }
    let (n, d) = (n as i64, d as i64);
    let six = |e: i64| BigInt::from(6) * upow(delta + 2, e as u64);
    let dm1 = |e: i64| upow(delta - 1, e as u64);
    let hp = HalfPowers::new();
    let hp = match case {
        TheoremCase::Lt => {
            let e = n + d - 4;
            hp.add(dm1(n - d), e + 4)
                .add(dm1(n - d), e + 1)
                .add(six(n), e + 3)
                .add(six(n), e)
        }
        TheoremCase::Eq => {
            let e = n + d - 3;
            hp.add(dm1(n - d - 1), e + 3)
                .add(dm1(n - d - 1), e + 1)
                .add(six(n), e + 2)
                .add(six(n), e)
        }
        TheoremCase::Gt => hp
            .add(dm1(n - d - 1), n + d)
            .add(six(n), n + d - 1)
            .add(dm1(n - 1), n - 2),
        TheoremCase::GConst => {
            let e = n + d - 4;
            hp.add(dm1(n - d), e + 3)
                .add(dm1(n - d), e + 1)
                .add(six(n), e + 2)
                .add(six(n), e)
        }
    };
    hp.finish(q)
}

/// `q^((n-1)/2) (2 (t-1)^(n-1) q^(1/2) + 6 (t+2)^n)`.
pub fn bound_linear_f(q: u64, n: u64, t: u64) -> Result<SqrtBound> {
    check_q(q)?;
    if n < 3 {
        return Err(Error::HypothesisViolation(format!("need n >= 3, got {n}")));
    }
    if t < 1 {
        return Err(Error::HypothesisViolation("degree parameter must be >= 1".into()));
    }
    HalfPowers::new()
        .add(BigInt::from(2) * upow(t - 1, n - 1), n as i64)
        .add(BigInt::from(6) * upow(t + 2, n), n as i64 - 1)
        .finish(q)
}

pub fn bound_deformed(q: u64, n: u64, m: u64) -> Result<SqrtBound> {
    bound_linear_f(q, n, m)
}

pub fn bound_carlitz(q: u64, n: u64, d: u64) -> Result<SqrtBound> {
    bound_linear_f(q, n, d)
}

pub fn bound_dickson(q: u64, n: u64, d: u64) -> Result<SqrtBound> {
    bound_linear_f(q, n, d)
}

/// Weil's estimate for `sum c_i X_i^m = b`, `b != 0`:
/// `(m-1)^n q^((n-2)/2) (1 + q^(1/2))`.
pub fn bound_weil_diagonal(q: u64, n: u64, m: u64) -> Result<SqrtBound> {
    check_q(q)?;
    if n < 1 || m < 1 {
        return Err(Error::HypothesisViolation("need n, m >= 1".into()));
    }
    let c = upow(m - 1, n);
    HalfPowers::new()
        .add(c.clone(), n as i64 - 2)
        .add(c, n as i64 - 1)
        .finish(q)
}

/// Homogeneous diagonal form `sum c_i X_i^m = 0`:
/// `(m-1)^(n-1) q^((n-2)/2) (q - 1)`.
pub fn bound_homogeneous_diagonal(q: u64, n: u64, m: u64) -> Result<SqrtBound> {
    check_q(q)?;
    if n < 1 || m < 1 {
        return Err(Error::HypothesisViolation("need n, m >= 1".into()));
    }
    let c = upow(m - 1, n - 1);
    HalfPowers::new()
        .add(c.clone(), n as i64)
        .add(-c, n as i64 - 2)
        .finish(q)
}

/// Solutions with `i` prescribed zero coordinates, main term `q^(n-i-1)`.
pub fn bound_ni(q: u64, n: u64, i: u64, m: u64, a_zero: bool) -> Result<SqrtBound> {
    check_q(q)?;
    if m < 1 {
        return Err(Error::HypothesisViolation("need m >= 1".into()));
    }
    let r = n as i64 - i as i64;
    if a_zero {
        if i < 1 || r < 2 {
            return Err(Error::HypothesisViolation(format!(
                "a = 0 needs 1 <= i <= n - 2, got i = {i}, n = {n}"
            )));
        }
        let c = upow(m - 1, (r - 1) as u64);
        HalfPowers::new().add(c.clone(), r).add(-c, r - 2).finish(q)
    } else {
        if i < 1 || r < 1 {
            return Err(Error::HypothesisViolation(format!(
                "a != 0 needs 1 <= i <= n - 1, got i = {i}, n = {n}"
            )));
        }
        let c = upow(m - 1, r as u64);
        HalfPowers::new().add(c.clone(), r - 2).add(c, r - 1).finish(q)
    }
}

/// `7 (2m)^n q^(n/2)` for the nonzero-coordinate count.
pub fn bound_mh_star(q: u64, n: u64, m: u64) -> Result<SqrtBound> {
    if q <= 2 {
        return Err(Error::HypothesisViolation(format!("need q > 2, got {q}")));
    }
    HalfPowers::new()
        .add(BigInt::from(7) * upow(2 * m, n), n as i64)
        .finish(q)
}

/// Main term paired with [`bound_mh_star`].
pub fn mh_star_main(q: u64, n: u64, a_zero: bool) -> MainTerm {
    if a_zero {
        MainTerm::mh_nonzero_a_zero(q, n)
    } else {
        MainTerm::mh_nonzero(q, n)
    }
}

/// Hypersurface of degree `delta` in `P^ambient` whose singular locus has
/// dimension at most `s`: `(delta-1)^(m-s) q^((m+s+1)/2) +
/// 6 (delta+2)^(m+1) q^((m+s)/2)` with `m = ambient - 1`. `s = -1` means
/// nonsingular and gives the Deligne bound.
pub fn gl_hypersurface_bound(q: u64, ambient: u64, delta: u64, s: i64) -> Result<SqrtBound> {
    check_q(q)?;
    if ambient < 1 || delta < 1 {
        return Err(Error::HypothesisViolation("need ambient, delta >= 1".into()));
    }
    let m = ambient as i64 - 1;
    if s < -1 || s > m {
        return Err(Error::HypothesisViolation(format!(
            "singular dimension {s} outside -1..={m}"
        )));
    }
    if s == -1 {
        return deligne_hypersurface_bound(q, m as u64, delta);
    }
    HalfPowers::new()
        .add(upow(delta - 1, (m - s) as u64), m + s + 1)
        .add(BigInt::from(6) * upow(delta + 2, (m + 1) as u64), m + s)
        .finish(q)
}

/// Nonsingular hypersurface of dimension `r`: `(delta-1)^(r+1) q^(r/2)`.
pub fn deligne_hypersurface_bound(q: u64, r: u64, delta: u64) -> Result<SqrtBound> {
    check_q(q)?;
    if delta < 1 {
        return Err(Error::HypothesisViolation("need delta >= 1".into()));
    }
    HalfPowers::new()
        .add(upow(delta - 1, r + 1), r as i64)
        .finish(q)
}

/// `d_1 ... d_n q^(n/2)` with `d_i = gcd(m_i, q - 1)`.
pub fn bound_mordell(q: u64, ms: &[u64]) -> Result<SqrtBound> {
    check_q(q)?;
    if ms.is_empty() || ms.contains(&0) {
        return Err(Error::InvalidInput("exponents must be positive".into()));
    }
    let prod: BigInt = ms.iter().map(|&m| BigInt::from(gcd(m, q - 1))).product();
    HalfPowers::new().add(prod, ms.len() as i64).finish(q)
}

/// `(d0 d1^(n-1) - 1) q^((n-1)/2) + (d - d0) d1^(n-1) q^((n-2)/2)` with
/// `d1 = gcd(m, q-1)`, `d = gcd(n - k m, (q-1)/d1)`, `d0 = gcd(d, k)`.
pub fn bound_baoulina(q: u64, n: u64, m: u64, k: u64) -> Result<SqrtBound> {
    check_q(q)?;
    if n < 2 || m < 1 || m > q - 1 || k < 1 {
        return Err(Error::InvalidInput(
            "need n >= 2, 1 <= m <= q - 1, k >= 1".into(),
        ));
    }
    let d1 = gcd(m, q - 1);
    let diff = (n as i128 - (k as i128) * (m as i128)).unsigned_abs() as u64;
    let d = gcd(diff, (q - 1) / d1);
    let d0 = gcd(d, k);
    let p = upow(d1, n - 1);
    HalfPowers::new()
        .add(BigInt::from(d0) * &p - 1, n as i64 - 1)
        .add(BigInt::from(d as i64 - d0 as i64) * p, n as i64 - 2)
        .finish(q)
}

/// `q^((n-2)/2) (q-1) prod_{j<=t} (m_j - 1) prod_{j>t} (m_j + l_j)` with
/// `m_j = gcd(d_j, q-1)`, `l_j = gcd(d_j, q+1)`.
pub fn bound_chow(q: u64, ds: &[u64], t: usize) -> Result<SqrtBound> {
    check_q(q)?;
    if ds.len() < 2 || t > ds.len() || ds.iter().any(|&d| d < 2) {
        return Err(Error::InvalidInput("need n >= 2, d_j >= 2, t <= n".into()));
    }
    let n = ds.len() as i64;
    let mut c = BigInt::one();
    for (j, &d) in ds.iter().enumerate() {
        let mj = gcd(d, q - 1);
        if j < t {
            c *= BigInt::from(mj - 1);
        } else {
            c *= BigInt::from(mj + gcd(d, q + 1));
        }
    }
    HalfPowers::new().add(c.clone(), n).add(-c, n - 2).finish(q)
}

/// Machine-readable bound selector, e.g.
/// `{"theorem": "deformed", "q": 7, "n": 3, "m": 2}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "theorem", rename_all = "snake_case")]
pub enum BoundSpec {
    Main { q: u64, n: u64, d: u64, delta: u64, case: TheoremCase },
    LinearF { q: u64, n: u64, m: u64 },
    Deformed { q: u64, n: u64, m: u64 },
    Carlitz { q: u64, n: u64, d: u64 },
    Dickson { q: u64, n: u64, d: u64 },
    Weil { q: u64, n: u64, m: u64 },
    HomogeneousDiagonal { q: u64, n: u64, m: u64 },
    Ni { q: u64, n: u64, i: u64, m: u64, a_zero: bool },
    MhStar { q: u64, n: u64, m: u64 },
    GhorpadeLachaud { q: u64, ambient: u64, delta: u64, s: i64 },
    Deligne { q: u64, r: u64, delta: u64 },
    Mordell { q: u64, ms: Vec<u64> },
    Baoulina { q: u64, n: u64, m: u64, k: u64 },
    Chow { q: u64, ds: Vec<u64>, t: usize },
}

impl BoundSpec {
    pub fn evaluate(&self) -> Result<SqrtBound> {
        match self {
            BoundSpec::Main { q, n, d, delta, case } => bound_theorem_main(*q, *n, *d, *delta, *case),
            BoundSpec::LinearF { q, n, m } => bound_linear_f(*q, *n, *m),
            BoundSpec::Deformed { q, n, m } => bound_deformed(*q, *n, *m),
            BoundSpec::Carlitz { q, n, d } => bound_carlitz(*q, *n, *d),
            BoundSpec::Dickson { q, n, d } => bound_dickson(*q, *n, *d),
            BoundSpec::Weil { q, n, m } => bound_weil_diagonal(*q, *n, *m),
            BoundSpec::HomogeneousDiagonal { q, n, m } => bound_homogeneous_diagonal(*q, *n, *m),
            BoundSpec::Ni { q, n, i, m, a_zero } => bound_ni(*q, *n, *i, *m, *a_zero),
            BoundSpec::MhStar { q, n, m } => bound_mh_star(*q, *n, *m),
            BoundSpec::GhorpadeLachaud { q, ambient, delta, s } => {
                gl_hypersurface_bound(*q, *ambient, *delta, *s)
            }
            BoundSpec::Deligne { q, r, delta } => deligne_hypersurface_bound(*q, *r, *delta),
            BoundSpec::Mordell { q, ms } => bound_mordell(*q, ms),
            BoundSpec::Baoulina { q, n, m, k } => bound_baoulina(*q, *n, *m, *k),
            BoundSpec::Chow { q, ds, t } => bound_chow(*q, ds, *t),
        }
    }

    /// Short identifier used in reports.
    pub fn id(&self) -> &'static str {
        match self {
            BoundSpec::Main { case, .. } => match case {
                TheoremCase::Lt => "main_lt",
                TheoremCase::Eq => "main_eq",
                TheoremCase::Gt => "main_gt",
                TheoremCase::GConst => "main_g_const",
            },
            BoundSpec::LinearF { .. } => "linear_f",
            BoundSpec::Deformed { .. } => "deformed",
            BoundSpec::Carlitz { .. } => "carlitz",
            BoundSpec::Dickson { .. } => "dickson",
            BoundSpec::Weil { .. } => "weil",
            BoundSpec::HomogeneousDiagonal { .. } => "homogeneous_diagonal",
            BoundSpec::Ni { .. } => "ni",
            BoundSpec::MhStar { .. } => "mh_star",
            BoundSpec::GhorpadeLachaud { .. } => "ghorpade_lachaud",
            BoundSpec::Deligne { .. } => "deligne",
            BoundSpec::Mordell { .. } => "mordell",
            BoundSpec::Baoulina { .. } => "baoulina",
            BoundSpec::Chow { .. } => "chow",
        }
    }
}

/// Ratio `num / den` as an exact rational, `den > 0`.
pub fn ratio(num: impl Into<BigInt>, den: impl Into<BigInt>) -> BigRational {
    let (num, den) = (num.into(), den.into());
    let g = num.gcd(&den);
    if g.is_zero() {
        return BigRational::from_integer(BigInt::zero());
    }
    BigRational::new(num, den)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(x: u64) -> BigUint {
        BigUint::from(x)
    }

    fn ab(b: &SqrtBound) -> (BigUint, BigUint, u32) {
        (b.a.clone(), b.b.clone(), b.scale)
    }

    #[test]
    fn instantiation_examples() {
        assert_eq!(ab(&bound_deformed(7, 3, 2).unwrap()), (big(2688), big(14), 0));
        // q^((n-1)/2) = 9, 6 * 4^3 * 9 = 3456, 2 * 1 * 9 = 18 on sqrt(q).
        assert_eq!(ab(&bound_carlitz(9, 3, 2).unwrap()), (big(3456), big(18), 0));
        let lin = bound_linear_f(5, 4, 1).unwrap();
        // first addend vanishes: 6 * 3^4 * q^(3/2)
        assert_eq!(ab(&lin), (big(0), big(6 * 81 * 5), 0));
        assert_eq!(ab(&bound_weil_diagonal(7, 3, 2).unwrap()), (big(7), big(1), 0));
        for (q, n, m) in [(5u64, 5u64, 3u64), (7, 4, 2), (9, 6, 4)] {
            let b = bound_ni(q, n, n - 2, m, true).unwrap();
            assert_eq!(ab(&b), (big((m - 1) * (q - 1)), big(0), 0));
            assert_eq!(bound_ni(q, n, 1, 1, true).unwrap(), SqrtBound::zero(q));
        }
        assert_eq!(ab(&bound_mh_star(3, 3, 2).unwrap()), (big(0), big(1344), 0));
        assert!(matches!(bound_mh_star(2, 3, 2), Err(Error::HypothesisViolation(_))));
        assert_eq!(ab(&deligne_hypersurface_bound(7, 1, 3).unwrap()), (big(0), big(4), 0));
        assert_eq!(ab(&bound_mordell(5, &[2, 2, 2]).unwrap()), (big(0), big(40), 0));
    }

    #[test]
    fn main_term_examples() {
        assert_eq!(mh_star_main(3, 3, false), MainTerm::integer(3));
        // n = 4, q = 5: 256/5 + (5 - 1/5) = 280/5 = 56
        assert_eq!(mh_star_main(5, 4, true), MainTerm::integer(56));
        // n = 3, q = 3: 8/3 - (4 - 1/3) = -1
        assert_eq!(mh_star_main(3, 3, true), MainTerm::integer(-1));
        assert_eq!(MainTerm::projective(3, 2), MainTerm::integer(13));
        assert_eq!(MainTerm::projective(3, -1), MainTerm::integer(0));
        assert_eq!(
            MainTerm::mh_nonzero(4, 3),
            MainTerm(BigRational::new(BigInt::from(28), BigInt::from(4)))
        );
    }

    #[test]
    fn check_bound_examples() {
        let b = bound_mh_star(3, 3, 2).unwrap();
        let v = check_bound(&BigInt::from(4), &MainTerm::integer(3), &b);
        assert!(v.holds);
        assert_eq!(v.delta, BigRational::from_integer(BigInt::from(1)));

        let b = SqrtBound { a: big(2688), b: big(14), q: 7, scale: 0 };
        assert!(check_bound(&BigInt::from(100), &MainTerm::integer(0), &b).holds);

        let b = SqrtBound { a: big(2), b: big(1), q: 7, scale: 0 };
        let v = check_bound(&BigInt::from(10), &MainTerm::integer(0), &b);
        assert!(!v.holds);
        assert!(v.margin.starts_with("2.1"));
    }

    #[test]
    fn theorem_cases_and_ranges() {
        // delta = 1 zeroes every (delta - 1) addend.
        let b = bound_theorem_main(4, 5, 1, 1, TheoremCase::GConst).unwrap();
        // six(n) = 6 * 3^5 = 1458 at half-exponents e+2 = 4 and e = 2
        assert_eq!(ab(&b), (big(1458 * 16 + 1458 * 4), big(0), 0));
        assert!(bound_theorem_main(4, 5, 2, 3, TheoremCase::Eq).is_ok());
        assert!(matches!(
            bound_theorem_main(4, 4, 2, 3, TheoremCase::Eq),
            Err(Error::HypothesisViolation(_))
        ));
        assert!(bound_theorem_main(4, 4, 0, 3, TheoremCase::Eq).is_err());
    }

    #[test]
    fn gl_matches_linear_precursor() {
        // s = 0 in P^n reproduces the two leading addends before loosening.
        for (q, n, m) in [(5u64, 3u64, 2u64), (7, 5, 3), (9, 4, 4)] {
            let gl = gl_hypersurface_bound(q, n, m, 0).unwrap();
            let expect = HalfPowers::new()
                .add(upow(m - 1, n - 1), n as i64)
                .add(BigInt::from(6) * upow(m + 2, n), n as i64 - 1)
                .finish(q)
                .unwrap();
            assert_eq!(gl, expect);
            assert_eq!(
                gl_hypersurface_bound(q, n, m, -1).unwrap(),
                deligne_hypersurface_bound(q, n - 1, m).unwrap()
            );
        }
    }

    #[test]
    fn comparison_bound_shapes() {
        // all a_j = 0: only the (m_j - 1) product
        let c = bound_chow(7, &[3, 3, 3], 3).unwrap();
        // gcd(3, 6) = 3 -> 2^3 = 8; q^(1/2) (q - 1) -> B = 8 * 6
        assert_eq!(ab(&c), (big(0), big(48), 0));
        // k = 1, m | q - 1: d1 = m
        let b = bound_baoulina(7, 3, 3, 1).unwrap();
        // d1 = 3, d = gcd(0, 2) = 2, d0 = 1: (9 - 1) q + (2 - 1) 9 q^(1/2)
        assert_eq!(ab(&b), (big(56), big(9), 0));
    }

    #[test]
    fn negative_exponents_use_a_denominator() {
        // i = n - 1 with a != 0: (m-1) q^(-1/2) (1 + q^(1/2))
        let b = bound_ni(7, 3, 2, 3, false).unwrap();
        assert_eq!(ab(&b), (big(14), big(2), 1));
        assert!((b.to_f64() - (2.0 / 7f64.sqrt() + 2.0)).abs() < 1e-12);
        // |Delta| = 2 is within 2 + 2/sqrt(7); 3 is not.
        assert!(b.admits(&BigRational::from_integer(BigInt::from(2))));
        assert!(!b.admits(&BigRational::from_integer(BigInt::from(3))));
    }

    #[test]
    fn exact_ordering() {
        let q = 7;
        let x = SqrtBound { a: big(3), b: big(0), q, scale: 0 };
        let y = SqrtBound { a: big(0), b: big(1), q, scale: 0 };
        assert_eq!(x.cmp_exact(&y), Ordering::Greater); // 3 > sqrt 7
        let z = SqrtBound { a: big(21), b: big(0), q, scale: 1 };
        assert_eq!(z.cmp_exact(&x), Ordering::Equal);
        let nine = SqrtBound { a: big(0), b: big(1), q: 9, scale: 0 };
        let three = SqrtBound { a: big(3), b: big(0), q: 9, scale: 0 };
        assert_eq!(nine.cmp_exact(&three), Ordering::Equal);
    }

    #[test]
    fn json_descriptor() {
        let spec: BoundSpec =
            serde_json::from_str(r#"{"theorem": "deformed", "q": 7, "n": 3, "m": 2}"#).unwrap();
        let b = spec.evaluate().unwrap();
        let s = serde_json::to_value(&b).unwrap();
        assert_eq!(s["A"], "2688");
        assert_eq!(s["B"], "14");
    }
}
