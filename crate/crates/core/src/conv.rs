//! Exact additive convolution over `(Z/p)^k`, the additive group of `F_q`
//! in canonical index space.
//!
//! Small groups use schoolbook convolution. Larger ones use a number
//! theoretic transform over as many word-sized primes as the output
//! magnitude needs, then Garner reconstruction. No floating point.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::arith::{self, add_mod, mul_mod, pow_mod, sub_mod};
use crate::error::{Error, Result};
use crate::gf::FieldCtx;
use crate::par::{self, Execution};

/// Groups up to this order use schoolbook convolution under `Backend::Auto`.
pub const NAIVE_LIMIT: usize = 512;
/// Largest transform array (per prime) the NTT path will allocate.
pub const NTT_LIMIT: usize = 1 << 24;
/// Characteristics up to this size use a direct length-`p` transform per axis.
const DIRECT_DFT_MAX_P: u64 = 32;
const TWO_ADIC: u64 = 1 << 23;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Backend {
    #[default]
    Auto,
    Naive,
    Ntt,
}

/// `(Z/p)^k` with elements encoded as base-`p` integers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Group {
    p: u64,
    k: u32,
    q: usize,
}

impl Group {
    pub fn new(p: u64, k: u32) -> Self {
        Group {
            p,
            k,
            q: p.pow(k) as usize,
        }
    }

    pub fn of(ctx: &FieldCtx) -> Self {
        Self::new(ctx.p(), ctx.k())
    }

    pub fn order(&self) -> usize {
        self.q
    }

    #[inline]
    pub fn add(&self, x: usize, y: usize) -> usize {
        self.combine(x, y, false)
    }

    #[inline]
    pub fn sub(&self, x: usize, y: usize) -> usize {
        self.combine(x, y, true)
    }

    #[inline]
    fn combine(&self, mut x: usize, mut y: usize, minus: bool) -> usize {
        let p = self.p as usize;
        if self.k == 1 {
            return if minus { (x + p - y) % p } else { (x + y) % p };
        }
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.k {
            let (a, b) = (x % p, y % p);
            let d = if minus { (a + p - b) % p } else { (a + b) % p };
            out += d * place;
            place *= p;
            x /= p;
            y /= p;
        }
        out
    }
}

fn total(v: &[BigUint]) -> BigUint {
    v.iter().sum()
}

fn to_u128(v: &[BigUint]) -> Vec<u128> {
    v.iter().map(|x| x.to_u128().expect("fits")).collect()
}

/// `c[t] = sum_x a[x] b[t - x]` over the group.
pub fn convolve(
    g: &Group,
    a: &[BigUint],
    b: &[BigUint],
    backend: Backend,
    exec: Execution,
) -> Result<Vec<BigUint>> {
    if a.len() != g.q || b.len() != g.q {
        return Err(Error::DimensionMismatch {
            expected: g.q,
            got: if a.len() != g.q { a.len() } else { b.len() },
        });
    }
    let bound = total(a) * total(b);
    let use_naive = match backend {
        Backend::Naive => true,
        Backend::Ntt => false,
        Backend::Auto => g.q <= NAIVE_LIMIT,
    };
    if use_naive {
        if bound.bits() < 127 {
            let (a, b) = (to_u128(a), to_u128(b));
            let c = par::map_indexed(exec, g.q, |t| {
                (0..g.q).map(|x| a[x] * b[g.sub(t, x)]).sum::<u128>()
            });
            return Ok(c.into_iter().map(BigUint::from).collect());
        }
        return Ok(par::map_indexed(exec, g.q, |t| {
            (0..g.q).map(|x| &a[x] * &b[g.sub(t, x)]).sum()
        }));
    }
    ntt_convolve(g, a, b, &bound, exec)
}

/// A single output entry `sum_x a[x] b[target - x]`.
pub fn convolve_at(g: &Group, a: &[BigUint], b: &[BigUint], target: usize) -> BigUint {
    (0..g.q)
        .filter(|&x| !a[x].is_zero())
        .map(|x| &a[x] * &b[g.sub(target, x)])
        .sum()
}

// ---- NTT machinery -------------------------------------------------------

#[derive(Clone, Copy, Debug)]
struct NttPrime {
    modulus: u64,
    generator: u64,
}

fn primitive_root(p: u64) -> u64 {
    let factors = arith::factorize(p - 1);
    (2..p)
        .find(|&g| factors.iter().all(|&(r, _)| pow_mod(g, (p - 1) / r, p) != 1))
        .expect("prime moduli have primitive roots")
}

/// Distinct primes `P = c * step + 1 < 2^62`, largest first.
fn ntt_primes(step: u64, count: usize) -> Vec<NttPrime> {
    let mut out = Vec::with_capacity(count);
    let mut c = ((1u64 << 62) - 1) / step;
    while out.len() < count {
        assert!(c > 0, "ran out of NTT primes");
        let cand = c * step + 1;
        if arith::is_prime(cand) {
            out.push(NttPrime {
                modulus: cand,
                generator: primitive_root(cand),
            });
        }
        c -= 1;
    }
    out
}

fn bit_reverse(a: &mut [u64]) {
    let n = a.len();
    let mut j = 0;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            a.swap(i, j);
        }
    }
}

fn ntt_pow2(a: &mut [u64], invert: bool, pr: NttPrime) {
    let n = a.len();
    let m = pr.modulus;
    bit_reverse(a);
    let mut len = 2;
    while len <= n {
        let mut w = pow_mod(pr.generator, (m - 1) / len as u64, m);
        if invert {
            w = arith::inv_mod_prime(w, m);
        }
        for start in (0..n).step_by(len) {
            let mut wj = 1u64;
            for j in 0..len / 2 {
                let u = a[start + j];
                let v = mul_mod(a[start + j + len / 2], wj, m);
                a[start + j] = add_mod(u, v, m);
                a[start + j + len / 2] = sub_mod(u, v, m);
                wj = mul_mod(wj, w, m);
            }
        }
        len <<= 1;
    }
    if invert {
        let inv_n = arith::inv_mod_prime(n as u64 % m, m);
        for x in a.iter_mut() {
            *x = mul_mod(*x, inv_n, m);
        }
    }
}

/// Length-`n` cyclic DFT by definition (`n` small, `n | P - 1`).
fn dft_direct(a: &mut [u64], invert: bool, pr: NttPrime, buf: &mut Vec<u64>) {
    let n = a.len();
    let m = pr.modulus;
    let mut w = pow_mod(pr.generator, (m - 1) / n as u64, m);
    if invert {
        w = arith::inv_mod_prime(w, m);
    }
    let powers: Vec<u64> = (0..n as u64).map(|e| pow_mod(w, e, m)).collect();
    buf.clear();
    for j in 0..n {
        let mut s = 0u64;
        for (x, &ax) in a.iter().enumerate() {
            s = add_mod(s, mul_mod(ax, powers[(x * j) % n], m), m);
        }
        buf.push(s);
    }
    a.copy_from_slice(buf);
    if invert {
        let inv_n = arith::inv_mod_prime(n as u64, m);
        for x in a.iter_mut() {
            *x = mul_mod(*x, inv_n, m);
        }
    }
}

/// Transform along every axis of a `side^k` array.
fn transform_nd(data: &mut [u64], side: usize, k: u32, invert: bool, pr: NttPrime, direct: bool) {
    let mut line = vec![0u64; side];
    let mut buf = Vec::with_capacity(side);
    let mut stride = 1usize;
    for _ in 0..k {
        let block = stride * side;
        for base in (0..data.len()).step_by(block) {
            for off in 0..stride {
                let start = base + off;
                for (i, slot) in line.iter_mut().enumerate() {
                    *slot = data[start + i * stride];
                }
                if direct {
                    dft_direct(&mut line, invert, pr, &mut buf);
                } else {
                    ntt_pow2(&mut line, invert, pr);
                }
                for (i, &v) in line.iter().enumerate() {
                    data[start + i * stride] = v;
                }
            }
        }
        stride = block;
    }
}

struct Layout {
    side: usize,
    direct: bool,
}

impl Layout {
    fn for_group(g: &Group) -> Result<Self> {
        if g.p <= DIRECT_DFT_MAX_P {
            return Ok(Layout {
                side: g.p as usize,
                direct: true,
            });
        }
        let side = (2 * g.p as usize - 1).next_power_of_two();
        let size = (side as u128).pow(g.k);
        if size > NTT_LIMIT as u128 || side as u64 > TWO_ADIC {
            return Err(Error::TooLarge(format!(
                "transform size {side}^{} for q = {}",
                g.k, g.q
            )));
        }
        Ok(Layout {
            side,
            direct: false,
        })
    }

    fn size(&self, k: u32) -> usize {
        self.side.pow(k)
    }

    /// Position of group element `x` in the padded array.
    fn embed(&self, g: &Group, mut x: usize) -> usize {
        if self.direct {
            return x;
        }
        let p = g.p as usize;
        let mut pos = 0;
        let mut place = 1;
        for _ in 0..g.k {
            pos += (x % p) * place;
            place *= self.side;
            x /= p;
        }
        pos
    }

    /// Group element a padded linear-convolution position folds onto.
    fn fold(&self, g: &Group, mut pos: usize) -> usize {
        if self.direct {
            return pos;
        }
        let p = g.p as usize;
        let mut x = 0;
        let mut place = 1;
        for _ in 0..g.k {
            x += ((pos % self.side) % p) * place;
            place *= p;
            pos /= self.side;
        }
        x
    }
}

fn residues_mod(v: &[BigUint], m: u64) -> Vec<u64> {
    let mb = BigUint::from(m);
    v.iter()
        .map(|x| match x.to_u64() {
            Some(s) => s % m,
            None => (x % &mb).to_u64().expect("reduced"),
        })
        .collect()
}

fn ntt_convolve(
    g: &Group,
    a: &[BigUint],
    b: &[BigUint],
    bound: &BigUint,
    exec: Execution,
) -> Result<Vec<BigUint>> {
    let layout = Layout::for_group(g)?;
    let step = if layout.direct && g.p > 2 {
        g.p * TWO_ADIC
    } else {
        TWO_ADIC
    };
    // Enough primes that their product exceeds every output entry.
    let mut count = 1;
    while BigUint::from(2u32).pow(61 * count as u32) <= *bound {
        count += 1;
    }
    let primes = ntt_primes(step, count);
    let size = layout.size(g.k);
    let embed: Vec<usize> = (0..g.q).map(|x| layout.embed(g, x)).collect();

    let per_prime: Vec<Vec<u64>> = par::map_indexed(exec, primes.len(), |j| {
        let pr = primes[j];
        let mut fa = vec![0u64; size];
        let mut fb = vec![0u64; size];
        for (x, (ra, rb)) in residues_mod(a, pr.modulus)
            .into_iter()
            .zip(residues_mod(b, pr.modulus))
            .enumerate()
        {
            fa[embed[x]] = ra;
            fb[embed[x]] = rb;
        }
        transform_nd(&mut fa, layout.side, g.k, false, pr, layout.direct);
        transform_nd(&mut fb, layout.side, g.k, false, pr, layout.direct);
        for (x, y) in fa.iter_mut().zip(&fb) {
            *x = mul_mod(*x, *y, pr.modulus);
        }
        transform_nd(&mut fa, layout.side, g.k, true, pr, layout.direct);
        let mut out = vec![0u64; g.q];
        for (pos, &v) in fa.iter().enumerate() {
            if v != 0 {
                let t = layout.fold(g, pos);
                out[t] = add_mod(out[t], v, pr.modulus);
            }
        }
        out
    });

    let moduli: Vec<u64> = primes.iter().map(|p| p.modulus).collect();
    let garner = Garner::new(&moduli);
    Ok((0..g.q)
        .map(|t| {
            let r: Vec<u64> = per_prime.iter().map(|v| v[t]).collect();
            garner.reconstruct(&r)
        })
        .collect())
}

/// Mixed-radix CRT reconstruction.
struct Garner {
    moduli: Vec<u64>,
    // inv[j] = (m_0 * ... * m_{j-1})^{-1} mod m_j
    inv: Vec<u64>,
}

impl Garner {
    fn new(moduli: &[u64]) -> Self {
        let inv = (0..moduli.len())
            .map(|j| {
                let prod = moduli[..j]
                    .iter()
                    .fold(1u64, |acc, &m| mul_mod(acc, m % moduli[j], moduli[j]));
                arith::inv_mod_prime(prod, moduli[j])
            })
            .collect();
        Garner {
            moduli: moduli.to_vec(),
            inv,
        }
    }

    fn reconstruct(&self, r: &[u64]) -> BigUint {
        let k = self.moduli.len();
        let mut digits = Vec::with_capacity(k);
        for j in 0..k {
            let mj = self.moduli[j];
            // value of the partial reconstruction mod m_j
            let mut acc = 0u64;
            let mut place = 1u64;
            for (i, &v) in digits.iter().enumerate() {
                acc = add_mod(acc, mul_mod(v % mj, place, mj), mj);
                place = mul_mod(place, self.moduli[i] % mj, mj);
            }
            digits.push(mul_mod(sub_mod(r[j] % mj, acc, mj), self.inv[j], mj));
        }
        if k <= 2 {
            let mut x = 0u128;
            for j in (0..k).rev() {
                x = x * self.moduli[j] as u128 + digits[j] as u128;
            }
            return BigUint::from(x);
        }
        let mut x = BigUint::zero();
        for j in (0..k).rev() {
            x = x * self.moduli[j] + digits[j];
        }
        x
    }
}
