//! Seeded verification sweeps: instance generation, counting, bound and
//! existence checks, CSV/JSON reports.

use num_bigint::{BigInt, BigUint};
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::bounds::{self, big_string, bigint_string, MainTerm, SqrtBound, TheoremCase};
use crate::counter::{
    self, CountConfig, CounterKind, EquationInstance, Family, MarkoffHurwitz, MhMethod,
};
use crate::error::{Error, Result};
use crate::existence::{self, ExistenceVerdict};
use crate::gf::{FieldCtx, FieldElement, FieldSpec};
use crate::par;
use crate::poly::{self, SparsePoly, Term, UniPoly, WeightedPoly};
use crate::rng::SplitMix64;

pub const CSV_HEADER: [&str; 15] = [
    "family", "q", "n", "param", "seed", "N", "main_num", "main_den", "delta_num", "delta_den", "bound_id", "A",
    "B", "holds", "margin",
];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CounterSelection {
    Oracle,
    #[default]
    Fast,
    /// Both counters; rows where they disagree are marked failed.
    Both,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GMode {
    /// Sparse random `g` below the family's degree bound.
    #[default]
    Random,
    /// Constant `g`, which keeps deformed, Carlitz and Dickson instances
    /// separable.
    Constant,
}

fn default_instances() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub family: Family,
    pub q: Vec<u64>,
    pub n: Vec<usize>,
    /// `m` or `d`, depending on the family.
    pub param: Vec<u32>,
    #[serde(default = "default_instances")]
    pub instances: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub counter: CounterSelection,
    /// Bound ids to report; empty means every applicable bound. `ni`
    /// selects all `ni_<i>` rows.
    #[serde(default)]
    pub bounds: Vec<String>,
    #[serde(default)]
    pub g_mode: GMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub brute_cap: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowStatus {
    Ok,
    Failed,
    Skipped,
    Error,
}

/// One count checked against one bound.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Measurement {
    pub bound_id: String,
    #[serde(rename = "N", with = "big_string")]
    pub count: BigUint,
    #[serde(with = "bigint_string")]
    pub main_num: BigInt,
    #[serde(with = "bigint_string")]
    pub main_den: BigInt,
    #[serde(with = "bigint_string")]
    pub delta_num: BigInt,
    #[serde(with = "bigint_string")]
    pub delta_den: BigInt,
    pub bound: SqrtBound,
    pub holds: bool,
    pub margin: String,
}

impl Measurement {
    pub fn new(bound_id: &str, count: BigUint, main: &MainTerm, bound: SqrtBound) -> Self {
        let v = bounds::check_bound(&BigInt::from(count.clone()), main, &bound);
        Measurement {
            bound_id: bound_id.to_string(),
            count,
            main_num: main.numer().clone(),
            main_den: main.denom().clone(),
            delta_num: v.delta.numer().clone(),
            delta_den: v.delta.denom().clone(),
            bound,
            holds: v.holds,
            margin: v.margin,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepRow {
    pub family: Family,
    pub q: u64,
    pub n: usize,
    pub param: u32,
    /// Instance index within the cell.
    pub index: usize,
    pub seed: u64,
    pub status: RowStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instance: Option<EquationInstance>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_big")]
    pub count: Option<BigUint>,
    pub measurements: Vec<Measurement>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle_agrees: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub existence_guaranteed: Option<bool>,
    /// Keying the main theorem's case by `deg(R_g - g)` and by `wt(f)`
    /// disagree.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub case_keys_differ: Option<bool>,
}

mod opt_big {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};
    use std::str::FromStr;

    pub fn serialize<S: Serializer>(v: &Option<BigUint>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(v) => s.serialize_some(&v.to_string()),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BigUint>, D::Error> {
        Option::<String>::deserialize(d)?
            .map(|s| BigUint::from_str(&s).map_err(serde::de::Error::custom))
            .transpose()
    }
}

// ---- instance generation -----------------------------------------------------

fn rand_elem(ctx: &FieldCtx, rng: &mut SplitMix64) -> FieldElement {
    ctx.elem_unchecked(rng.below(ctx.q()))
}

fn rand_nonzero(ctx: &FieldCtx, rng: &mut SplitMix64) -> FieldElement {
    ctx.elem_unchecked(rng.range(1, ctx.q() - 1))
}

/// Sparse random polynomial: at most `n + 2` terms, degree `< bound`,
/// uniform coefficients with zeros dropped.
pub fn random_sparse(ctx: &FieldCtx, n: usize, bound: u32, rng: &mut SplitMix64) -> SparsePoly {
    if bound == 0 {
        return SparsePoly::zero(n);
    }
    let count = rng.range(1, n as u64 + 2);
    let terms = (0..count)
        .map(|_| {
            let deg = rng.below(bound as u64);
            let mut e = vec![0u32; n];
            for _ in 0..deg {
                e[rng.below(n as u64) as usize] += 1;
            }
            Term {
                c: rand_elem(ctx, rng),
                e,
            }
        })
        .collect();
    SparsePoly::from_terms(ctx, n, terms).expect("well-formed terms")
}

fn rand_uni(ctx: &FieldCtx, d: u32, rng: &mut SplitMix64) -> UniPoly {
    let mut c: Vec<FieldElement> = (0..d).map(|_| rand_elem(ctx, rng)).collect();
    c.push(rand_nonzero(ctx, rng));
    UniPoly::new(c)
}

fn rand_g(ctx: &FieldCtx, n: usize, bound: u32, mode: GMode, rng: &mut SplitMix64) -> SparsePoly {
    match mode {
        GMode::Random => random_sparse(ctx, n, bound, rng),
        GMode::Constant => SparsePoly::constant(n, rand_elem(ctx, rng)),
    }
}

/// One random instance of `family` with parameters `(n, param)`.
pub fn generate_instance(
    ctx: &FieldCtx,
    family: Family,
    n: usize,
    param: u32,
    g_mode: GMode,
    rng: &mut SplitMix64,
) -> Result<EquationInstance> {
    let field = ctx.spec();
    let nonzero = |rng: &mut SplitMix64| -> Vec<FieldElement> { (0..n).map(|_| rand_nonzero(ctx, rng)).collect() };
    Ok(match family {
        Family::DeformedDiagonal => EquationInstance::DeformedDiagonal {
            field,
            coeffs: nonzero(rng),
            m: param,
            g: rand_g(ctx, n, param, g_mode, rng),
        },
        Family::Diagonal => EquationInstance::Diagonal {
            field,
            coeffs: nonzero(rng),
            m: param,
            rhs: rand_elem(ctx, rng),
        },
        Family::MarkoffHurwitz => {
            if param as usize <= n {
                return Err(Error::HypothesisViolation("no k with k_1 + ... + k_n < m".into()));
            }
            let coeffs = nonzero(rng);
            let mut k = vec![1u32; n];
            for _ in 0..rng.below((param as usize - n) as u64) {
                k[rng.below(n as u64) as usize] += 1;
            }
            EquationInstance::MarkoffHurwitz {
                field,
                n,
                m: param,
                a: rand_elem(ctx, rng),
                b: rand_elem(ctx, rng),
                coeffs,
                k,
            }
        }
        Family::Carlitz => EquationInstance::Carlitz {
            field,
            h: (0..n).map(|_| rand_uni(ctx, param, rng)).collect(),
            g: rand_g(ctx, n, param, g_mode, rng),
        },
        Family::Dickson => EquationInstance::Dickson {
            field,
            coeffs: nonzero(rng),
            d: param,
            a: (0..n).map(|_| rand_elem(ctx, rng)).collect(),
            g: rand_g(ctx, n, param, g_mode, rng),
        },
        Family::GeneralRg => generate_rg(ctx, n, param, rng)?,
    })
}

/// `f = b Y_1 + c` with weight `m`, and `g` either constant or
/// `X_1^e + ... + X_n^e + g_1` with `e` in `{m-1, m, m+1}`, `char` not
/// dividing `e`, `deg g_1 < e`. `b != -1` keeps the `e = m` top form
/// `(b+1) P_m` from cancelling.
fn generate_rg(ctx: &FieldCtx, n: usize, m: u32, rng: &mut SplitMix64) -> Result<EquationInstance> {
    let bs: Vec<FieldElement> = ctx
        .nonzero_elements()
        .filter(|&b| b != ctx.neg(ctx.one()))
        .collect();
    let mut choices: Vec<Option<u32>> = vec![None];
    for e in [m.wrapping_sub(1), m, m + 1] {
        if e >= 1 && e <= m + 1 && !ctx.char_divides(e as u64) && (e != m || !bs.is_empty()) {
            choices.push(Some(e));
        }
    }
    let choice = choices[rng.below(choices.len() as u64) as usize];
    let b = if choice == Some(m) {
        bs[rng.below(bs.len() as u64) as usize]
    } else {
        rand_nonzero(ctx, rng)
    };
    let c = rand_elem(ctx, rng);
    let f_inner = SparsePoly::from_terms(
        ctx,
        1,
        vec![Term { c: b, e: vec![1] }, Term { c, e: vec![0] }],
    )?;
    let f = WeightedPoly::new(vec![m], f_inner)?;
    let g = match choice {
        None => SparsePoly::constant(n, rand_elem(ctx, rng)),
        Some(e) => poly::power_sum(n, e).add(ctx, &random_sparse(ctx, n, e, rng))?,
    };
    let r = poly::build_rg(ctx, &f, &g)?;
    Ok(EquationInstance::GeneralRg {
        field: ctx.spec(),
        r,
        f: Some(f),
        g: Some(g),
    })
}

// ---- per-instance evaluation -------------------------------------------------

/// Cell-level gate: the violated hypothesis, if any.
pub fn cell_skip_reason(ctx: &FieldCtx, family: Family, n: usize, param: u32) -> Option<String> {
    let param_name = match family {
        Family::Carlitz | Family::Dickson => "d",
        _ => "m",
    };
    if param == 0 {
        return Some(format!("{param_name} must be positive"));
    }
    if ctx.char_divides(param as u64) {
        return Some(format!("char divides {param_name}"));
    }
    match family {
        Family::DeformedDiagonal | Family::Carlitz | Family::Dickson if n < 3 => Some("n < 3".into()),
        Family::Carlitz | Family::Dickson if param < 2 => Some("d < 2".into()),
        Family::MarkoffHurwitz if n < 3 => Some("n < 3".into()),
        Family::MarkoffHurwitz if param < 2 => Some("m < 2".into()),
        Family::MarkoffHurwitz if param as usize <= n => Some("no k with k_1 + ... + k_n < m".into()),
        Family::MarkoffHurwitz if ctx.q() <= 2 => Some("q <= 2".into()),
        Family::GeneralRg if n < 4 => Some("d > n - 3".into()),
        Family::Diagonal if n == 0 => Some("n < 1".into()),
        _ => None,
    }
}

fn separable_family(family: Family, g_mode: GMode) -> bool {
    match family {
        Family::Diagonal | Family::MarkoffHurwitz => true,
        Family::DeformedDiagonal | Family::Carlitz | Family::Dickson => g_mode == GMode::Constant,
        Family::GeneralRg => false,
    }
}

/// Everything measured for one instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Evaluation {
    pub count: BigUint,
    pub measurements: Vec<Measurement>,
    pub oracle_agrees: Option<bool>,
    pub existence: Option<ExistenceVerdict>,
    pub case_keys_differ: Option<bool>,
}

impl Evaluation {
    /// Reasons this evaluation fails verification.
    pub fn failures(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .measurements
            .iter()
            .filter(|m| !m.holds)
            .map(|m| format!("bound {} violated (N = {})", m.bound_id, m.count))
            .collect();
        if self.oracle_agrees == Some(false) {
            out.push("oracle and fast counts disagree".into());
        }
        if self.existence.as_ref().is_some_and(|e| e.guaranteed) && self.count.is_zero() {
            out.push("existence guaranteed but N = 0".into());
        }
        out
    }
}

fn selected(filter: &[String], id: &str) -> bool {
    filter.is_empty()
        || filter
            .iter()
            .any(|f| f == id || id.strip_prefix(f.as_str()).is_some_and(|r| r.starts_with('_')))
}

fn count_with(
    sel: CounterSelection,
    fast: impl Fn() -> Result<BigUint>,
    oracle: impl Fn() -> Result<BigUint>,
) -> Result<(BigUint, Option<bool>)> {
    match sel {
        CounterSelection::Fast => Ok((fast()?, None)),
        CounterSelection::Oracle => Ok((oracle()?, None)),
        CounterSelection::Both => {
            let (f, o) = (fast()?, oracle()?);
            let agree = f == o;
            Ok((f, Some(agree)))
        }
    }
}

fn merge_agree(a: Option<bool>, b: Option<bool>) -> Option<bool> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(x), Some(y)) => Some(x && y),
    }
}

/// Counts an instance and checks it against every applicable bound.
pub fn evaluate_instance(
    ctx: &FieldCtx,
    inst: &EquationInstance,
    sel: CounterSelection,
    filter: &[String],
    cfg: &CountConfig,
) -> Result<Evaluation> {
    inst.validate(ctx)?;
    let q = ctx.q();
    let n = inst.n();
    let param = inst.param();
    let (count, mut agree) = count_with(
        sel,
        || inst.count(ctx, CounterKind::Fast, cfg),
        || inst.count(ctx, CounterKind::Oracle, cfg),
    )?;
    let main = MainTerm::q_power(q, n as u64 - 1);
    let mut ms = Vec::new();
    let mut push = |id: &str, count: &BigUint, main: &MainTerm, b: Result<SqrtBound>| -> Result<()> {
        if selected(filter, id) {
            ms.push(Measurement::new(id, count.clone(), main, b?));
        }
        Ok(())
    };
    let nn = n as u64;
    let mut case_keys_differ = None;
    let char_ok = !ctx.char_divides(param);
    let existence = match inst {
        EquationInstance::DeformedDiagonal { .. } => {
            push("deformed", &count, &main, bounds::bound_deformed(q, nn, param))?;
            Some(existence::exists_deformed(q, n as u32, param as u32, char_ok))
        }
        EquationInstance::Diagonal { rhs, .. } => {
            if rhs.is_zero() {
                push("homogeneous_diagonal", &count, &main, bounds::bound_homogeneous_diagonal(q, nn, param))?;
            } else {
                push("weil", &count, &main, bounds::bound_weil_diagonal(q, nn, param))?;
            }
            (n >= 3).then(|| existence::exists_deformed(q, n as u32, param as u32, char_ok))
        }
        EquationInstance::Carlitz { .. } => {
            push("carlitz", &count, &main, bounds::bound_carlitz(q, nn, param))?;
            Some(existence::exists_carlitz(q, n as u32, param as u32, char_ok))
        }
        EquationInstance::Dickson { .. } => {
            push("dickson", &count, &main, bounds::bound_dickson(q, nn, param))?;
            Some(existence::exists_dickson(q, n as u32, param as u32, char_ok))
        }
        EquationInstance::MarkoffHurwitz { a, .. } => {
            let mh = inst.as_mh().expect("mh");
            push("deformed", &count, &main, bounds::bound_deformed(q, nn, param))?;
            if selected(filter, "mh_star") {
                let (star, ag) = count_with(
                    sel,
                    || counter::mh_nonzero(ctx, &mh, MhMethod::Auto, cfg),
                    || counter::mh_nonzero(ctx, &mh, MhMethod::Brute, cfg),
                )?;
                agree = merge_agree(agree, ag);
                push("mh_star", &star, &bounds::mh_star_main(q, nn, a.is_zero()), bounds::bound_mh_star(q, nn, param))?;
            }
            let top = if a.is_zero() { n.saturating_sub(2) } else { n - 1 };
            for i in 1..=top {
                let id = format!("ni_{i}");
                if !selected(filter, &id) {
                    continue;
                }
                let (ni, ag) = count_with(
                    sel,
                    || counter::mh_counts(ctx, &mh, counter::MhMode::ZeroPattern(i), cfg),
                    || mh_pattern_brute(ctx, &mh, i, cfg),
                )?;
                agree = merge_agree(agree, ag);
                let b = bounds::bound_ni(q, nn, i as u64, param, a.is_zero());
                push(&id, &ni, &MainTerm::q_power(q, (n - i - 1) as u64), b)?;
            }
            let a_nonzero = !a.is_zero();
            Some(existence::exists_mh(q, nn, param, char_ok, a_nonzero))
        }
        EquationInstance::GeneralRg { r, f, g, .. } => {
            if let (Some(f), Some(g)) = (f, g) {
                let delta = r.degree().unwrap_or(0);
                let wt = f.weight()?;
                let key_deg = r.sub(ctx, g)?.degree().unwrap_or(0);
                let case = if g.is_constant() {
                    Some(TheoremCase::GConst)
                } else {
                    g.diagonal_top_degree().map(|e| match (e as u64).cmp(&wt) {
                        std::cmp::Ordering::Less => TheoremCase::Lt,
                        std::cmp::Ordering::Equal => TheoremCase::Eq,
                        std::cmp::Ordering::Greater => TheoremCase::Gt,
                    })
                };
                if let Some(case) = case {
                    if let Some(e) = g.diagonal_top_degree() {
                        case_keys_differ = Some((e as u64).cmp(&wt) != (e as u64).cmp(&key_deg));
                    }
                    let spec = bounds::BoundSpec::Main {
                        q,
                        n: nn,
                        d: f.d() as u64,
                        delta,
                        case,
                    };
                    let id = spec.id();
                    push(id, &count, &main, spec.evaluate())?;
                }
            }
            None
        }
    };
    Ok(Evaluation {
        count,
        measurements: ms,
        oracle_agrees: agree,
        existence,
        case_keys_differ,
    })
}

/// Zero-pattern count by enumeration: first `i` coordinates zero.
fn mh_pattern_brute(ctx: &FieldCtx, mh: &MarkoffHurwitz, i: usize, cfg: &CountConfig) -> Result<BigUint> {
    let r = mh.polynomial(ctx);
    let ev = counter::Evaluator::new(ctx, &r);
    let c = counter::count_points(ctx, mh.n(), cfg, |x| x[..i].iter().all(|v| v.is_zero()) && ev.eval(x).is_zero())?;
    Ok(BigUint::from(c))
}

// ---- sweeps ------------------------------------------------------------------

struct Job {
    cell: usize,
    q: u64,
    n: usize,
    param: u32,
    index: usize,
    skip: Option<String>,
}

fn row_seed(seed: u64, cell: usize, index: usize) -> u64 {
    SplitMix64::derive(seed, ((cell as u64) << 32) | index as u64).next_u64()
}

/// Runs every cell of the spec. Rows are ordered by cell (`q`, then `n`,
/// then `param`) and instance index; a skipped cell yields one row.
pub fn run_sweep(spec: &SweepSpec) -> Vec<SweepRow> {
    let mut cfg = CountConfig::default();
    if let Some(cap) = spec.brute_cap {
        cfg.brute_cap = cap;
    }
    let mut jobs = Vec::new();
    let mut cell = 0;
    for &q in &spec.q {
        for &n in &spec.n {
            for &param in &spec.param {
                let skip = match FieldCtx::from_q(q) {
                    Err(e) => Some(e.to_string()),
                    Ok(ctx) => cell_skip_reason(&ctx, spec.family, n, param).or_else(|| {
                        let brute = spec.counter != CounterSelection::Fast || !separable_family(spec.family, spec.g_mode);
                        let big = (q as u128).checked_pow(n as u32).is_none_or(|t| t > cfg.brute_cap as u128);
                        (brute && big).then(|| "q^n exceeds the brute-force cap".to_string())
                    }),
                };
                if skip.is_some() {
                    jobs.push(Job { cell, q, n, param, index: 0, skip });
                } else {
                    for index in 0..spec.instances {
                        jobs.push(Job { cell, q, n, param, index, skip: None });
                    }
                }
                cell += 1;
            }
        }
    }
    // Rows are independent and map_indexed keeps their order.
    let cfg = &cfg;
    par::map_indexed(cfg.exec, jobs.len(), |j| run_job(spec, &jobs[j], cfg))
}

fn run_job(spec: &SweepSpec, job: &Job, cfg: &CountConfig) -> SweepRow {
    let seed = row_seed(spec.seed, job.cell, job.index);
    let mut row = SweepRow {
        family: spec.family,
        q: job.q,
        n: job.n,
        param: job.param,
        index: job.index,
        seed,
        status: RowStatus::Ok,
        reason: None,
        instance: None,
        count: None,
        measurements: Vec::new(),
        oracle_agrees: None,
        existence_guaranteed: None,
        case_keys_differ: None,
    };
    if let Some(reason) = &job.skip {
        row.status = RowStatus::Skipped;
        row.reason = Some(reason.clone());
        return row;
    }
    let result = (|| -> Result<()> {
        let ctx = FieldCtx::from_q(job.q)?;
        let mut rng = SplitMix64::new(seed);
        let inst = generate_instance(&ctx, spec.family, job.n, job.param, spec.g_mode, &mut rng)?;
        row.instance = Some(inst.clone());
        let ev = evaluate_instance(&ctx, &inst, spec.counter, &spec.bounds, cfg)?;
        let failures = ev.failures();
        row.count = Some(ev.count);
        row.measurements = ev.measurements;
        row.oracle_agrees = ev.oracle_agrees;
        row.existence_guaranteed = ev.existence.map(|e| e.guaranteed);
        row.case_keys_differ = ev.case_keys_differ;
        if !failures.is_empty() {
            row.status = RowStatus::Failed;
            row.reason = Some(failures.join("; "));
        }
        Ok(())
    })();
    if let Err(e) = result {
        row.status = RowStatus::Error;
        row.reason = Some(e.to_string());
    }
    row
}

/// Runs a sweep with at most `threads` workers.
pub fn run_sweep_with_threads(spec: &SweepSpec, threads: Option<usize>) -> Vec<SweepRow> {
    par::install(threads, || run_sweep(spec))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportFormat {
    Csv,
    Json,
}

/// CSV with one line per measurement. Rows without measurements (skipped,
/// errors, or no applicable bound) get one line whose `holds` column carries
/// the status and whose `margin` column carries the reason.
pub fn report_csv(rows: &[SweepRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("in-memory write");
    for r in rows {
        let head = [
            r.family.name().to_string(),
            r.q.to_string(),
            r.n.to_string(),
            r.param.to_string(),
            r.seed.to_string(),
        ];
        if r.measurements.is_empty() {
            let status = match r.status {
                RowStatus::Ok => "",
                RowStatus::Failed => "failed",
                RowStatus::Skipped => "skipped",
                RowStatus::Error => "error",
            };
            let count = r.count.as_ref().map(|c| c.to_string()).unwrap_or_default();
            let mut rec: Vec<String> = head.to_vec();
            rec.push(count);
            rec.extend(std::iter::repeat_n(String::new(), 7));
            rec.push(status.to_string());
            rec.push(r.reason.clone().unwrap_or_default());
            w.write_record(&rec).expect("in-memory write");
            continue;
        }
        for m in &r.measurements {
            let mut rec: Vec<String> = head.to_vec();
            rec.extend([
                m.count.to_string(),
                m.main_num.to_string(),
                m.main_den.to_string(),
                m.delta_num.to_string(),
                m.delta_den.to_string(),
                m.bound_id.clone(),
                m.bound.a.to_string(),
                m.bound.b.to_string(),
                m.holds.to_string(),
                m.margin.clone(),
            ]);
            w.write_record(&rec).expect("in-memory write");
        }
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

pub fn report_json(rows: &[SweepRow]) -> String {
    serde_json::to_string_pretty(rows).expect("rows serialize")
}

pub fn report(rows: &[SweepRow], format: ReportFormat) -> String {
    match format {
        ReportFormat::Csv => report_csv(rows),
        ReportFormat::Json => report_json(rows),
    }
}

pub fn parse_json(doc: &str) -> Result<Vec<SweepRow>> {
    serde_json::from_str(doc).map_err(|e| Error::InvalidInput(e.to_string()))
}

/// Descriptions of failed or errored rows; empty when the sweep verifies.
pub fn verify(rows: &[SweepRow]) -> Vec<String> {
    rows.iter()
        .filter(|r| matches!(r.status, RowStatus::Failed | RowStatus::Error))
        .map(|r| {
            format!(
                "{} q={} n={} param={} seed={}: {}",
                r.family.name(),
                r.q,
                r.n,
                r.param,
                r.seed,
                r.reason.as_deref().unwrap_or("failed")
            )
        })
        .collect()
}

/// Field spec for `q` with the default modulus.
pub fn field_for(q: u64) -> Result<FieldSpec> {
    FieldSpec::from_q(q)
}
