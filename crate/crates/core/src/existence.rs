//! Existence predicates decided by exact integer comparison, Felszeghy's
//! variable count, and exact Waring numbers by sumset closure.

use std::collections::{BTreeMap, HashSet};

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::conv::{self, Backend, Group};
use crate::error::{Error, Result};
use crate::gf::{FieldCtx, FieldElement};
use crate::par::Execution;
use crate::poly::UniPoly;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExistenceVerdict {
    pub criterion: String,
    /// Premise name to whether it holds.
    pub premises: BTreeMap<String, bool>,
    pub guaranteed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<FieldElement>>,
}

impl ExistenceVerdict {
    fn new(criterion: &str, premises: &[(&str, bool)], threshold: bool) -> Self {
        let premises: BTreeMap<String, bool> = premises.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        let ok = premises.values().all(|&v| v);
        ExistenceVerdict {
            criterion: criterion.to_string(),
            premises,
            guaranteed: ok && threshold,
            witness: None,
        }
    }

    pub fn premises_satisfied(&self) -> bool {
        self.premises.values().all(|&v| v)
    }

    /// `Err(PremiseViolation)` naming the first failed premise.
    pub fn require_premises(&self) -> Result<&Self> {
        match self.premises.iter().find(|(_, &v)| !v) {
            Some((name, _)) => Err(Error::PremiseViolation(format!("{}: {name} fails", self.criterion))),
            None => Ok(self),
        }
    }

    pub fn with_witness(mut self, w: Option<Vec<FieldElement>>) -> Self {
        self.witness = w;
        self
    }
}

fn big(x: u64) -> BigUint {
    BigUint::from(x)
}

/// Deformed diagonal equations: solvable when `q^(n-2) > (m+2)^(2n)`.
pub fn exists_deformed(q: u64, n: u32, m: u32, char_ok: bool) -> ExistenceVerdict {
    let threshold = n >= 3 && big(q).pow(n - 2) > big(m as u64 + 2).pow(2 * n);
    ExistenceVerdict::new(
        "deformed",
        &[("n >= 3", n >= 3), ("char(F_q) does not divide m", char_ok)],
        threshold,
    )
}

/// Markoff-Hurwitz with `a != 0`, nonzero coordinates:
/// `(q - 2 - 4m^2)(n - 112m^2) > 112m^2(2 + 4m^2)`.
pub fn exists_mh(q: u64, n: u64, m: u64, char_ok: bool, a_nonzero: bool) -> ExistenceVerdict {
    let c = 112 * m as u128 * m as u128;
    let s = 2 + 4 * m as u128 * m as u128;
    let n_ok = n as u128 > c;
    let threshold = n_ok && {
        let excess = BigUint::from(n as u128 - c);
        BigUint::from(q) * &excess > BigUint::from(c) * s + BigUint::from(s) * excess
    };
    ExistenceVerdict::new(
        "mh",
        &[
            ("n > 112 m^2", n_ok),
            ("m >= 2", m >= 2),
            ("char(F_q) does not divide m", char_ok),
            ("a != 0", a_nonzero),
        ],
        threshold,
    )
}

/// Carlitz equations: `q^(n-2) > (d+2)^(2n)`.
pub fn exists_carlitz(q: u64, n: u32, d: u32, char_ok: bool) -> ExistenceVerdict {
    let threshold = n >= 3 && big(q).pow(n - 2) > big(d as u64 + 2).pow(2 * n);
    ExistenceVerdict::new(
        "carlitz",
        &[
            ("n >= 3", n >= 3),
            ("d >= 2", d >= 2),
            ("char(F_q) does not divide d", char_ok),
        ],
        threshold,
    )
}

/// Dickson equations: `q > (4/9)(d+2)^(2n/(n-2))`, raised to the `n-2`:
/// `9^(n-2) q^(n-2) > 4^(n-2) (d+2)^(2n)`.
pub fn exists_dickson(q: u64, n: u32, d: u32, char_ok: bool) -> ExistenceVerdict {
    let threshold = n >= 3 && {
        let e = n - 2;
        big(9).pow(e) * big(q).pow(e) > big(4).pow(e) * big(d as u64 + 2).pow(2 * n)
    };
    ExistenceVerdict::new(
        "dickson",
        &[
            ("n >= 3", n >= 3),
            ("d >= 2", d >= 2),
            ("char(F_q) does not divide d", char_ok),
        ],
        threshold,
    )
}

/// `ceil((p-1) / floor((p-1)/m))`.
pub fn felszeghy_n(p: u64, m: u64) -> Result<u64> {
    if m == 0 || m > p.saturating_sub(1) {
        return Err(Error::MOutOfRange { m, max: p.saturating_sub(1) });
    }
    Ok((p - 1).div_ceil((p - 1) / m))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WaringNumber {
    Finite(u64),
    /// Some `beta` is never a sum of values of `h`.
    Unbounded,
}

impl WaringNumber {
    pub fn finite(self) -> Option<u64> {
        match self {
            WaringNumber::Finite(n) => Some(n),
            WaringNumber::Unbounded => None,
        }
    }
}

/// Least `t` with `S_t = F_q`, where `S_1` is the value set of `h` and
/// `S_{t+1} = S_t + S_1`.
///
/// `S_t` need not grow when `0` is not a value, so termination is by
/// detecting a repeated set.
pub fn waring_exact(ctx: &FieldCtx, h: &UniPoly, exec: Execution) -> Result<WaringNumber> {
    if h.is_constant() {
        return Err(Error::ConstantPolynomial);
    }
    let q = ctx.q() as usize;
    let g = Group::of(ctx);
    let mut s1 = vec![BigUint::zero(); q];
    for x in ctx.elements() {
        s1[h.eval(ctx, x).index() as usize] = BigUint::one();
    }
    let mut seen: HashSet<Vec<bool>> = HashSet::new();
    let mut cur = s1.clone();
    for t in 1u64.. {
        let support: Vec<bool> = cur.iter().map(|c| !c.is_zero()).collect();
        if support.iter().all(|&b| b) {
            return Ok(WaringNumber::Finite(t));
        }
        if !seen.insert(support) {
            return Ok(WaringNumber::Unbounded);
        }
        cur = conv::convolve(&g, &cur, &s1, Backend::Auto, exec)?
            .into_iter()
            .map(|c| if c.is_zero() { c } else { BigUint::one() })
            .collect();
    }
    unreachable!()
}

/// `ceil(log(q^2) / log(q / (d+2)^2))` as the least `n` with
/// `q^(n-2) >= (d+2)^(2n)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WaringCeiling {
    pub n: u64,
    /// `q^(n-2) = (d+2)^(2n)` exactly, so a strict reading would give `n + 1`.
    pub boundary_equal: bool,
    /// `q^(d-3) > (d+2)^(2(d-1))`, the premise under which the ceiling is at most `d`.
    pub premise_holds: bool,
}

pub fn waring_bound_ceiling(q: u64, d: u32) -> Result<WaringCeiling> {
    let base = big(d as u64 + 2).pow(2);
    if big(q) <= base {
        return Err(Error::PremiseViolation(format!("q = {q} <= (d+2)^2 = {base}")));
    }
    let mut lhs = BigUint::one(); // q^(n-2), starting at n = 2
    let mut rhs = base.pow(2); // (d+2)^(2n)
    let mut n = 2u64;
    while lhs < rhs {
        lhs *= q;
        rhs *= &base;
        n += 1;
    }
    let premise_holds = d >= 4 && big(q).pow(d - 3) > big(d as u64 + 2).pow(2 * (d - 1));
    Ok(WaringCeiling {
        n,
        boundary_equal: lhs == rhs,
        premise_holds,
    })
}
