//! Empirical checks of the singular-locus analysis: the matrix `A(x)` of
//! scaled power-sum derivatives, the sets `Z_1` and `Z_2`, exhaustive scans
//! for rational singular points, and growth diagnostics.

use serde::Serialize;

use crate::counter::{self, CountConfig, EquationInstance, Evaluator};
use crate::error::{Error, Result};
use crate::gf::{FieldCtx, FieldElement};
use crate::poly::{SparsePoly, Term, UniPoly, WeightedPoly};

/// `f(S_{m_1}, ..., S_{m_d}) + g` with `S_m = c_1 X_1^m + ... + c_n X_n^m`.
/// Unit scales give the power sums `P_m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RgSystem {
    pub f: WeightedPoly,
    pub scales: Vec<FieldElement>,
    pub g: SparsePoly,
}

impl RgSystem {
    pub fn new(f: WeightedPoly, scales: Vec<FieldElement>, g: SparsePoly) -> Result<Self> {
        if scales.len() != g.nvars() {
            return Err(Error::DimensionMismatch {
                expected: g.nvars(),
                got: scales.len(),
            });
        }
        if scales.iter().any(|c| c.is_zero()) {
            return Err(Error::InvalidInput("scales must be nonzero".into()));
        }
        Ok(RgSystem { f, scales, g })
    }

    pub fn power_sums(ctx: &FieldCtx, f: WeightedPoly, g: SparsePoly) -> Result<Self> {
        let n = g.nvars();
        Self::new(f, vec![ctx.one(); n], g)
    }

    /// `c_1 X_1^m + ... + c_n X_n^m + g`.
    pub fn deformed(coeffs: Vec<FieldElement>, m: u32, g: SparsePoly) -> Result<Self> {
        Self::new(WeightedPoly::linear(m), coeffs, g)
    }

    /// Every family except a bare `general_rg` (no `f`) is a deformed
    /// diagonal equation once lower-order parts are moved into `g`.
    pub fn from_instance(ctx: &FieldCtx, inst: &EquationInstance) -> Result<Self> {
        inst.validate(ctx)?;
        let n = inst.n();
        let r = inst.polynomial(ctx)?;
        match inst {
            EquationInstance::GeneralRg { f: Some(f), g, .. } => {
                let g = match g {
                    Some(g) => g.clone(),
                    None => SparsePoly::zero(n),
                };
                Self::power_sums(ctx, f.clone(), g)
            }
            EquationInstance::GeneralRg { .. } => Err(Error::InvalidInput(
                "general_rg instance needs f to locate A(x)".into(),
            )),
            EquationInstance::Carlitz { h, .. } => {
                let d = inst.param() as u32;
                let lead: Vec<FieldElement> = h.iter().map(|p| leading_at(p, d)).collect();
                split_diagonal(ctx, &r, lead, d)
            }
            EquationInstance::DeformedDiagonal { coeffs, m, .. }
            | EquationInstance::MarkoffHurwitz { coeffs, m, .. }
            | EquationInstance::Diagonal { coeffs, m, .. } => split_diagonal(ctx, &r, coeffs.clone(), *m),
            EquationInstance::Dickson { coeffs, d, .. } => split_diagonal(ctx, &r, coeffs.clone(), *d),
        }
    }

    pub fn n(&self) -> usize {
        self.scales.len()
    }

    pub fn d(&self) -> usize {
        self.f.d()
    }

    pub fn scaled_sum(&self, ctx: &FieldCtx, m: u32) -> SparsePoly {
        let n = self.n();
        let terms = self
            .scales
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                let mut e = vec![0; n];
                e[i] = m;
                Term { c, e }
            })
            .collect();
        SparsePoly::from_terms(ctx, n, terms).expect("distinct monomials")
    }

    /// The full polynomial `R_g`.
    pub fn polynomial(&self, ctx: &FieldCtx) -> Result<SparsePoly> {
        let n = self.n();
        let sums: Vec<SparsePoly> = self.f.weights.iter().map(|&m| self.scaled_sum(ctx, m)).collect();
        let mut acc = self.g.clone();
        for t in self.f.inner.terms() {
            let mut prod = SparsePoly::constant(n, t.c);
            for (j, &a) in t.e.iter().enumerate() {
                if a > 0 {
                    prod = prod.mul(ctx, &sums[j].pow(ctx, a)?)?;
                }
            }
            acc = acc.add(ctx, &prod)?;
        }
        Ok(acc)
    }

    /// `(S_{m_1}(x), ..., S_{m_d}(x))`.
    pub fn sums_at(&self, ctx: &FieldCtx, x: &[FieldElement]) -> Vec<FieldElement> {
        self.f
            .weights
            .iter()
            .map(|&m| {
                x.iter()
                    .zip(&self.scales)
                    .fold(ctx.zero(), |acc, (&xi, &c)| ctx.add(acc, ctx.mul(c, ctx.pow(xi, m as u64))))
            })
            .collect()
    }
}

fn leading_at(p: &UniPoly, d: u32) -> FieldElement {
    p.coeffs().get(d as usize).copied().unwrap_or(FieldElement::ZERO)
}

/// Writes `R = sum c_i X_i^m + g` and returns the system with that `g`.
fn split_diagonal(ctx: &FieldCtx, r: &SparsePoly, coeffs: Vec<FieldElement>, m: u32) -> Result<RgSystem> {
    let sys = RgSystem::deformed(coeffs, m, SparsePoly::zero(r.nvars()))?;
    let diag = sys.scaled_sum(ctx, m);
    let g = r.sub(ctx, &diag)?;
    Ok(RgSystem { g, ..sys })
}

/// `A(x)` with entries `c_i m_j x_i^(m_j - 1)`, its rank, and optionally the
/// rank of the augmented matrix for a right-hand side.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct JacobianProfile {
    pub d: usize,
    pub n: usize,
    pub matrix: Vec<Vec<FieldElement>>,
    pub rank: usize,
    pub augmented_rank: Option<usize>,
}

/// Row rank by Gaussian elimination; pivots are the first nonzero entry in
/// column-major order.
pub fn rank(ctx: &FieldCtx, rows: &[Vec<FieldElement>]) -> usize {
    let mut m: Vec<Vec<FieldElement>> = rows.to_vec();
    let ncols = m.first().map_or(0, |r| r.len());
    let mut r = 0;
    for col in 0..ncols {
        let Some(piv) = (r..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(r, piv);
        let inv = ctx.inv(m[r][col]).expect("nonzero pivot");
        for i in r + 1..m.len() {
            if m[i][col].is_zero() {
                continue;
            }
            let factor = ctx.mul(m[i][col], inv);
            for j in col..ncols {
                let v = ctx.mul(factor, m[r][j]);
                m[i][j] = ctx.sub(m[i][j], v);
            }
        }
        r += 1;
        if r == m.len() {
            break;
        }
    }
    r
}

pub fn jacobian_at_scaled(
    ctx: &FieldCtx,
    weights: &[u32],
    scales: &[FieldElement],
    x: &[FieldElement],
) -> Result<JacobianProfile> {
    if scales.len() != x.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: scales.len(),
        });
    }
    for &m in weights {
        if ctx.char_divides(m as u64) {
            return Err(Error::HypothesisViolation(format!(
                "char(F_q) = {} divides m = {m}",
                ctx.p()
            )));
        }
    }
    let matrix: Vec<Vec<FieldElement>> = weights
        .iter()
        .map(|&m| {
            let mm = ctx.from_int(m as i64);
            x.iter()
                .zip(scales)
                .map(|(&xi, &c)| ctx.mul(ctx.mul(c, mm), ctx.pow(xi, m as u64 - 1)))
                .collect()
        })
        .collect();
    let rank = rank(ctx, &matrix);
    Ok(JacobianProfile {
        d: weights.len(),
        n: x.len(),
        matrix,
        rank,
        augmented_rank: None,
    })
}

pub fn jacobian_at(ctx: &FieldCtx, weights: &[u32], x: &[FieldElement]) -> Result<JacobianProfile> {
    let ones = vec![ctx.one(); x.len()];
    jacobian_at_scaled(ctx, weights, &ones, x)
}

impl JacobianProfile {
    /// Rank of `A(x)` with `rhs` appended as an extra row, i.e. the augmented
    /// matrix of `A(x)^t y = rhs`.
    pub fn with_rhs(mut self, ctx: &FieldCtx, rhs: &[FieldElement]) -> Self {
        let mut rows = self.matrix.clone();
        rows.push(rhs.to_vec());
        self.augmented_rank = Some(rank(ctx, &rows));
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PointClass {
    pub in_z1: bool,
    pub in_z2: bool,
}

fn eval_all(ctx: &FieldCtx, ps: &[SparsePoly], x: &[FieldElement]) -> Result<Vec<FieldElement>> {
    ps.iter().map(|p| p.eval(ctx, x)).collect()
}

/// `Z_1`: `rank A(x) < d`. `Z_2`: `rank A(x) = rank M_A(x) = d`, where
/// `M_A` is augmented by `-grad g(x)`. For constant `g` only `Z_1` applies.
pub fn classify_point(ctx: &FieldCtx, sys: &RgSystem, x: &[FieldElement]) -> Result<PointClass> {
    let grad_g = sys.g.gradient(ctx);
    classify_with(ctx, sys, &grad_g, x).map(|(c, _)| c)
}

fn classify_with(
    ctx: &FieldCtx,
    sys: &RgSystem,
    grad_g: &[SparsePoly],
    x: &[FieldElement],
) -> Result<(PointClass, Vec<FieldElement>)> {
    let d = sys.d();
    let prof = jacobian_at_scaled(ctx, &sys.f.weights, &sys.scales, x)?;
    let gg = eval_all(ctx, grad_g, x)?;
    if prof.rank < d {
        return Ok((PointClass { in_z1: true, in_z2: false }, gg));
    }
    if sys.g.is_constant() {
        return Ok((PointClass { in_z1: false, in_z2: false }, gg));
    }
    let neg: Vec<FieldElement> = gg.iter().map(|&v| ctx.neg(v)).collect();
    let prof = prof.with_rhs(ctx, &neg);
    let in_z2 = prof.augmented_rank == Some(d);
    Ok((PointClass { in_z1: false, in_z2 }, gg))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SingularScan {
    /// Rational points with `R_g = 0` and `grad R_g = 0`.
    pub singular_affine: Vec<Vec<FieldElement>>,
    /// How many of them lie in `Z_1`, respectively `Z_2`.
    pub z1: usize,
    pub z2: usize,
    /// Projective zeros of the top form with vanishing gradient.
    pub singular_infinity: u64,
    /// `(delta - 1)^n`.
    pub bezout_ceiling: num_bigint::BigUint,
}

impl SingularScan {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "singular_affine": self
                .singular_affine
                .iter()
                .map(|p| p.iter().map(|c| c.index()).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
            "z1": self.z1,
            "z2": self.z2,
            "singular_infinity": self.singular_infinity,
        })
    }
}

/// Projective singular points of a form: nonzero `x` with `H(x) = 0` and
/// `grad H(x) = 0`, divided by `q - 1`.
pub fn singular_at_infinity(ctx: &FieldCtx, r: &SparsePoly, cfg: &CountConfig) -> Result<u64> {
    let top = r.top_degree_component()?;
    if top.is_constant() {
        return Ok(0);
    }
    let ev = Evaluator::new(ctx, &top);
    let grads: Vec<SparsePoly> = top.gradient(ctx);
    let gev: Vec<Evaluator> = grads.iter().map(|p| Evaluator::new(ctx, p)).collect();
    let c = counter::count_points(ctx, top.nvars(), cfg, |x| {
        x.iter().any(|v| !v.is_zero()) && ev.eval(x).is_zero() && gev.iter().all(|e| e.eval(x).is_zero())
    })?;
    let qm1 = ctx.q() - 1;
    if c % qm1 != 0 {
        return Err(Error::InvariantViolation(format!(
            "{c} singular cone points not divisible by q - 1"
        )));
    }
    Ok(c / qm1)
}

/// Exhaustive scan. Asserts that every singular point lies in `Z_1 u Z_2`
/// (`Z_1` for constant `g` when `grad f(P(x)) != 0`), that `grad g` does not
/// vanish on singular points of `Z_2`, and the Bezout ceiling when the
/// system is a deformed diagonal one.
pub fn singular_scan(ctx: &FieldCtx, sys: &RgSystem, cfg: &CountConfig) -> Result<SingularScan> {
    let r = sys.polynomial(ctx)?;
    let n = sys.n();
    let ev = Evaluator::new(ctx, &r);
    let grads = r.gradient(ctx);
    let gev: Vec<Evaluator> = grads.iter().map(|p| Evaluator::new(ctx, p)).collect();
    let points = counter::collect_points(ctx, n, cfg, |x| {
        ev.eval(x).is_zero() && gev.iter().all(|e| e.eval(x).is_zero())
    })?;
    let grad_g = sys.g.gradient(ctx);
    let grad_f = sys.f.inner.gradient(ctx);
    let (mut z1, mut z2) = (0, 0);
    for x in &points {
        if !r.eval(ctx, x)?.is_zero() || eval_all(ctx, &grads, x)?.iter().any(|v| !v.is_zero()) {
            return Err(Error::InvariantViolation(format!("scanned point {x:?} is not singular")));
        }
        let (class, gg) = classify_with(ctx, sys, &grad_g, x)?;
        let h1 = eval_all(ctx, &grad_f, &sys.sums_at(ctx, x))?.iter().any(|v| !v.is_zero());
        if class.in_z1 {
            z1 += 1;
        } else if class.in_z2 {
            z2 += 1;
            if gg.iter().all(|v| v.is_zero()) {
                return Err(Error::InvariantViolation(format!("grad g vanishes at Z_2 point {x:?}")));
            }
        } else if !sys.g.is_constant() || h1 {
            return Err(Error::InvariantViolation(format!("singular point {x:?} outside Z_1 u Z_2")));
        }
    }
    let delta = r.degree().unwrap_or(0);
    let bezout_ceiling = num_bigint::BigUint::from(delta.saturating_sub(1)).pow(n as u32);
    let deformed = sys.d() == 1 && sys.f.inner == WeightedPoly::linear(sys.f.weights[0]).inner;
    if deformed && !ctx.char_divides(sys.f.weights[0] as u64) && num_bigint::BigUint::from(points.len()) > bezout_ceiling {
        return Err(Error::InvariantViolation(format!(
            "{} singular points exceed (delta - 1)^n = {bezout_ceiling}",
            points.len()
        )));
    }
    let singular_infinity = singular_at_infinity(ctx, &r, cfg)?;
    Ok(SingularScan {
        singular_affine: points,
        z1,
        z2,
        singular_infinity,
        bezout_ceiling,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct GrowthRow {
    pub q: u64,
    pub singular: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GrowthProbe {
    pub rows: Vec<GrowthRow>,
    /// Least-squares slope of `log |Sigma|` against `log q` over rows with
    /// a nonzero count; diagnostic only.
    pub slope: Option<f64>,
}

/// Singular-point counts for one family template across several fields.
pub fn dimension_growth_probe<T>(qs: &[u64], template: T, cfg: &CountConfig) -> Result<GrowthProbe>
where
    T: Fn(&FieldCtx) -> Result<RgSystem>,
{
    let mut rows = Vec::with_capacity(qs.len());
    for &q in qs {
        let ctx = FieldCtx::from_q(q)?;
        let sys = template(&ctx)?;
        let scan = singular_scan(&ctx, &sys, cfg)?;
        rows.push(GrowthRow {
            q,
            singular: scan.singular_affine.len(),
        });
    }
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.singular > 0)
        .map(|r| ((r.q as f64).ln(), (r.singular as f64).ln()))
        .collect();
    let slope = (pts.len() >= 2).then(|| {
        let k = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
        if sxx == 0.0 { 0.0 } else { sxy / sxx }
    });
    Ok(GrowthProbe { rows, slope })
}
