//! Argument parsing and dispatch for the `fqcount` binary. `run` returns the
//! exit code and both output streams so the binary stays a thin wrapper.

use std::fmt::Write as _;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::{BigInt, BigUint};
use serde_json::{json, Map, Value};

use fqcount::bounds::{self, BoundSpec, MainTerm};
use fqcount::counter::{CountConfig, EquationInstance, Family};
use fqcount::existence::{self, WaringNumber};
use fqcount::geometry::{self, RgSystem};
use fqcount::harness::{self, CounterSelection, ReportFormat, SweepSpec};
use fqcount::{arith, Error, FieldCtx, FieldElement, FieldSpec, SparsePoly, UniPoly};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_HYPOTHESIS: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

#[derive(Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug)]
struct Failure {
    code: i32,
    msg: String,
}

impl Failure {
    fn usage(msg: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            msg: msg.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_hypothesis() { EXIT_HYPOTHESIS } else { EXIT_USAGE };
        Failure { code, msg: e.to_string() }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

#[derive(Parser, Debug)]
#[command(name = "fqcount", version, about = "Exact point counts and error bounds over finite fields")]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Worker thread cap.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Count the solutions of one equation and check its bounds.
    Count(CountArgs),
    /// Evaluate a bound as A + B sqrt(q), optionally checking a count.
    Bound(BoundArgs),
    /// Decide an existence threshold.
    Exists(ExistsArgs),
    /// Waring number of h over F_q, or the ceiling from the bound.
    Waring(WaringArgs),
    /// Scan an equation for rational singular points.
    Singular(InstanceArgs),
    /// Run a sweep described by a JSON spec.
    Sweep(SweepArgs),
}

#[derive(Args, Debug, Clone, Default)]
struct FieldArgs {
    /// Characteristic.
    #[arg(long)]
    p: Option<u64>,
    /// Extension degree.
    #[arg(long)]
    k: Option<u32>,
    /// Monic modulus coefficients, low to high.
    #[arg(long, value_delimiter = ',')]
    modulus: Option<Vec<u64>>,
    /// Field size p^k.
    #[arg(long)]
    q: Option<u64>,
}

impl FieldArgs {
    fn spec(&self) -> CliResult<FieldSpec> {
        let spec = match (self.p, self.q) {
            (Some(p), None) => FieldSpec {
                p,
                k: self.k.unwrap_or(1),
                modulus: self.modulus.clone(),
            },
            (None, Some(q)) => {
                if self.k.is_some() {
                    return Err(Failure::usage("--k cannot be combined with --q"));
                }
                FieldSpec {
                    modulus: self.modulus.clone(),
                    ..FieldSpec::from_q(q)?
                }
            }
            (Some(p), Some(q)) => {
                let k = self.k.unwrap_or(1);
                if p.checked_pow(k) != Some(q) {
                    return Err(Failure::usage(format!("--q {q} is not --p {p} to the --k {k}")));
                }
                FieldSpec {
                    p,
                    k,
                    modulus: self.modulus.clone(),
                }
            }
            (None, None) => return Err(Failure::usage("a field is required: pass --p (and --k) or --q")),
        };
        Ok(spec)
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
#[value(rename_all = "snake_case")]
enum FamilyArg {
    #[value(alias = "deformed")]
    DeformedDiagonal,
    #[value(alias = "mh")]
    MarkoffHurwitz,
    Carlitz,
    Dickson,
    GeneralRg,
    Diagonal,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Family {
        match f {
            FamilyArg::DeformedDiagonal => Family::DeformedDiagonal,
            FamilyArg::MarkoffHurwitz => Family::MarkoffHurwitz,
            FamilyArg::Carlitz => Family::Carlitz,
            FamilyArg::Dickson => Family::Dickson,
            FamilyArg::GeneralRg => Family::GeneralRg,
            FamilyArg::Diagonal => Family::Diagonal,
        }
    }
}

#[derive(Args, Debug, Clone)]
struct InstanceArgs {
    #[command(flatten)]
    field: FieldArgs,
    /// Equation family (ignored with --instance).
    #[arg(long, value_enum)]
    family: Option<FamilyArg>,
    /// Equation instance as a JSON file.
    #[arg(long)]
    instance: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<u32>,
    #[arg(long)]
    d: Option<u32>,
    /// Coefficients c_i (or a_i), as element indices.
    #[arg(long, value_delimiter = ',')]
    coeffs: Option<Vec<u64>>,
    /// The constant a (Markoff-Hurwitz) or the parameters a_i (Dickson).
    #[arg(long, value_delimiter = ',')]
    a: Option<Vec<u64>>,
    #[arg(long)]
    b: Option<u64>,
    /// Exponents k_i.
    #[arg(long, value_delimiter = ',')]
    kvec: Option<Vec<u32>>,
    /// g as a JSON file holding a sparse polynomial.
    #[arg(long)]
    g: Option<String>,
    /// Univariate polynomial, coefficients low to high; repeat once per
    /// variable for Carlitz equations.
    #[arg(long, value_delimiter = ',')]
    h: Vec<String>,
    #[arg(long)]
    rhs: Option<u64>,
}

#[derive(Args, Debug)]
struct CountArgs {
    #[command(flatten)]
    inst: InstanceArgs,
    #[arg(long, value_enum, default_value = "fast")]
    counter: CounterArg,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum CounterArg {
    Oracle,
    Fast,
    Both,
}

impl From<CounterArg> for CounterSelection {
    fn from(c: CounterArg) -> Self {
        match c {
            CounterArg::Oracle => CounterSelection::Oracle,
            CounterArg::Fast => CounterSelection::Fast,
            CounterArg::Both => CounterSelection::Both,
        }
    }
}

#[derive(Args, Debug)]
struct BoundArgs {
    /// Bound id: main, linear_f, deformed, carlitz, dickson, weil,
    /// homogeneous_diagonal, ni, mh_star, ghorpade_lachaud, deligne,
    /// mordell, baoulina, chow.
    #[arg(long)]
    theorem: String,
    #[arg(long)]
    q: u64,
    #[arg(long)]
    n: Option<u64>,
    #[arg(long)]
    m: Option<u64>,
    #[arg(long)]
    d: Option<u64>,
    /// Degree of R_g for the main theorem.
    #[arg(long)]
    delta: Option<u64>,
    /// lt, eq, gt or g_const.
    #[arg(long)]
    case: Option<String>,
    #[arg(long)]
    i: Option<u64>,
    #[arg(long)]
    a_zero: bool,
    #[arg(long)]
    ambient: Option<u64>,
    #[arg(long, allow_hyphen_values = true)]
    s: Option<i64>,
    #[arg(long)]
    r: Option<u64>,
    #[arg(long)]
    k: Option<u64>,
    #[arg(long)]
    t: Option<u64>,
    #[arg(long, value_delimiter = ',')]
    ms: Option<Vec<u64>>,
    #[arg(long, value_delimiter = ',')]
    ds: Option<Vec<u64>>,
    /// Solution count to check against the bound.
    #[arg(long)]
    count: Option<String>,
    /// Main term as `num` or `num/den`; defaults to the theorem's own.
    #[arg(long)]
    main: Option<String>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Criterion {
    Deformed,
    Mh,
    Carlitz,
    Dickson,
    Felszeghy,
}

#[derive(Args, Debug)]
struct ExistsArgs {
    #[arg(long, value_enum)]
    criterion: Criterion,
    /// Field size (for felszeghy, the prime p).
    #[arg(long)]
    q: Option<u64>,
    #[arg(long)]
    p: Option<u64>,
    #[arg(long)]
    n: Option<u64>,
    #[arg(long)]
    m: Option<u64>,
    #[arg(long)]
    d: Option<u64>,
    /// The Markoff-Hurwitz constant a is zero.
    #[arg(long)]
    a_zero: bool,
}

#[derive(Args, Debug)]
struct WaringArgs {
    #[command(flatten)]
    field: FieldArgs,
    /// h, coefficients low to high.
    #[arg(long, value_delimiter = ',')]
    h: Option<Vec<u64>>,
    /// Print the ceiling from the bound for degree --d (or deg h).
    #[arg(long)]
    ceiling: bool,
    #[arg(long)]
    d: Option<u32>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// Sweep config (JSON).
    #[arg(long)]
    spec: String,
    /// Override the spec's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<String>,
    /// Exit with status 3 if any row fails.
    #[arg(long)]
    verify: bool,
}

pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => Outcome {
                    code: EXIT_OK,
                    stdout: text,
                    stderr: String::new(),
                },
                _ => Outcome {
                    code: EXIT_USAGE,
                    stdout: String::new(),
                    stderr: text,
                },
            };
        }
    };
    let threads = cli.threads;
    let json = cli.json;
    let result = fqcount::par::install(threads, || dispatch(cli.command, json));
    match result {
        Ok((code, stdout)) => Outcome {
            code,
            stdout,
            stderr: String::new(),
        },
        Err(f) => Outcome {
            code: f.code,
            stdout: String::new(),
            stderr: format!("error: {}\n", f.msg),
        },
    }
}

fn dispatch(cmd: Command, json: bool) -> CliResult<(i32, String)> {
    match cmd {
        Command::Count(a) => cmd_count(a, json),
        Command::Bound(a) => cmd_bound(a, json),
        Command::Exists(a) => cmd_exists(a, json),
        Command::Waring(a) => cmd_waring(a, json),
        Command::Singular(a) => cmd_singular(a, json),
        Command::Sweep(a) => cmd_sweep(a, json),
    }
}

fn read_file(path: &str) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("cannot read {path}: {e}")))
}

fn elems(ctx: &FieldCtx, idx: &[u64]) -> CliResult<Vec<FieldElement>> {
    Ok(idx.iter().map(|&i| ctx.elem(i)).collect::<fqcount::Result<_>>()?)
}

fn need<T: Clone>(v: &Option<T>, flag: &str, family: &str) -> CliResult<T> {
    v.clone()
        .ok_or_else(|| Failure::usage(format!("--{flag} is required for {family}")))
}

fn parse_uni(ctx: &FieldCtx, text: &str) -> CliResult<UniPoly> {
    let idx: Vec<u64> = text
        .split(',')
        .map(|s| s.trim().parse::<u64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Failure::usage(format!("bad polynomial {text:?}: {e}")))?;
    Ok(UniPoly::from_indices(ctx, &idx)?)
}

fn read_g(ctx: &FieldCtx, path: &Option<String>, n: usize) -> CliResult<SparsePoly> {
    match path {
        None => Ok(SparsePoly::zero(n)),
        Some(p) => {
            let g: SparsePoly = serde_json::from_str(&read_file(p)?)
                .map_err(|e| Failure::usage(format!("bad polynomial in {p}: {e}")))?;
            if g.nvars() != n {
                return Err(Failure::usage(format!("g has {} variables, expected {n}", g.nvars())));
            }
            Ok(g.normalized(ctx)?)
        }
    }
}

fn check_n(n: usize, got: usize, flag: &str) -> CliResult<()> {
    if n != got {
        return Err(Failure::usage(format!("--{flag} has {got} entries but --n is {n}")));
    }
    Ok(())
}

fn build_instance(args: &InstanceArgs) -> CliResult<(FieldCtx, EquationInstance)> {
    if let Some(path) = &args.instance {
        let inst: EquationInstance = serde_json::from_str(&read_file(path)?)
            .map_err(|e| Failure::usage(format!("bad instance in {path}: {e}")))?;
        let ctx = inst.ctx()?;
        return Ok((ctx, inst));
    }
    let family = args
        .family
        .ok_or_else(|| Failure::usage("--family or --instance is required"))?;
    let spec = args.field.spec()?;
    let ctx = FieldCtx::from_spec(&spec)?;
    let name = Family::from(family).name();
    let coeffs = |ctx: &FieldCtx| -> CliResult<Vec<FieldElement>> { elems(ctx, &need(&args.coeffs, "coeffs", name)?) };
    let n_from = |len: usize| -> CliResult<usize> {
        let n = args.n.unwrap_or(len);
        check_n(n, len, "coeffs")?;
        Ok(n)
    };
    let inst = match family {
        FamilyArg::Diagonal => {
            let c = coeffs(&ctx)?;
            n_from(c.len())?;
            EquationInstance::Diagonal {
                field: spec,
                coeffs: c,
                m: need(&args.m, "m", name)?,
                rhs: ctx.elem(args.rhs.unwrap_or(0))?,
            }
        }
        FamilyArg::DeformedDiagonal => {
            let c = coeffs(&ctx)?;
            let n = n_from(c.len())?;
            EquationInstance::DeformedDiagonal {
                field: spec,
                coeffs: c,
                m: need(&args.m, "m", name)?,
                g: read_g(&ctx, &args.g, n)?,
            }
        }
        FamilyArg::MarkoffHurwitz => {
            let c = coeffs(&ctx)?;
            let n = n_from(c.len())?;
            let a = match args.a.as_deref() {
                None => 0,
                Some([a]) => *a,
                Some(_) => return Err(Failure::usage("--a takes a single element for markoff_hurwitz")),
            };
            let k = need(&args.kvec, "kvec", name)?;
            check_n(n, k.len(), "kvec")?;
            EquationInstance::MarkoffHurwitz {
                field: spec,
                n,
                m: need(&args.m, "m", name)?,
                a: ctx.elem(a)?,
                b: ctx.elem(need(&args.b, "b", name)?)?,
                coeffs: c,
                k,
            }
        }
        FamilyArg::Carlitz => {
            if args.h.is_empty() {
                return Err(Failure::usage("--h is required for carlitz (once per variable)"));
            }
            let h = args.h.iter().map(|t| parse_uni(&ctx, t)).collect::<CliResult<Vec<_>>>()?;
            let n = args.n.unwrap_or(h.len());
            check_n(n, h.len(), "h")?;
            EquationInstance::Carlitz {
                field: spec,
                g: read_g(&ctx, &args.g, n)?,
                h,
            }
        }
        FamilyArg::Dickson => {
            let c = coeffs(&ctx)?;
            let n = n_from(c.len())?;
            let a = elems(&ctx, &args.a.clone().unwrap_or_else(|| vec![0; n]))?;
            check_n(n, a.len(), "a")?;
            EquationInstance::Dickson {
                field: spec,
                coeffs: c,
                d: need(&args.d, "d", name)?,
                a,
                g: read_g(&ctx, &args.g, n)?,
            }
        }
        FamilyArg::GeneralRg => {
            let path = need(&args.g, "g", "general_rg (the file holds R)")?;
            let r: SparsePoly = serde_json::from_str(&read_file(&path)?)
                .map_err(|e| Failure::usage(format!("bad polynomial in {path}: {e}")))?;
            EquationInstance::GeneralRg {
                field: spec,
                r: r.normalized(&ctx)?,
                f: None,
                g: None,
            }
        }
    };
    inst.validate(&ctx)?;
    Ok((ctx, inst))
}

fn failed_hypotheses(ctx: &FieldCtx, inst: &EquationInstance) -> Vec<String> {
    inst.hypotheses(ctx)
        .into_iter()
        .filter(|h| !h.holds)
        .map(|h| h.name)
        .collect()
}

fn cmd_count(args: CountArgs, json: bool) -> CliResult<(i32, String)> {
    let (ctx, inst) = build_instance(&args.inst)?;
    let cfg = CountConfig::default();
    let failed = failed_hypotheses(&ctx, &inst);
    let sel = CounterSelection::from(args.counter);
    let (count, ev) = if failed.is_empty() {
        let ev = harness::evaluate_instance(&ctx, &inst, sel, &[], &cfg)?;
        (ev.count.clone(), Some(ev))
    } else {
        let kind = match sel {
            CounterSelection::Oracle => fqcount::counter::CounterKind::Oracle,
            _ => fqcount::counter::CounterKind::Fast,
        };
        (inst.count(&ctx, kind, &cfg)?, None)
    };
    let failures = ev.as_ref().map(|e| e.failures()).unwrap_or_default();
    let code = if !failed.is_empty() {
        EXIT_HYPOTHESIS
    } else if !failures.is_empty() {
        EXIT_VERIFY
    } else {
        EXIT_OK
    };
    let mut out = String::new();
    if json {
        let measurements = ev.as_ref().map(|e| serde_json::to_value(&e.measurements).expect("serializable"));
        let doc = json!({
            "family": inst.family().name(),
            "q": ctx.q(),
            "n": inst.n(),
            "N": count.to_string(),
            "measurements": measurements.unwrap_or(Value::Array(vec![])),
            "oracle_agrees": ev.as_ref().and_then(|e| e.oracle_agrees),
            "existence": ev.as_ref().and_then(|e| e.existence.clone()),
            "failed_hypotheses": failed,
            "failures": failures,
        });
        writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("json")).ok();
    } else {
        writeln!(out, "N = {count}").ok();
        for h in &failed {
            writeln!(out, "hypothesis fails: {h}; bounds not checked").ok();
        }
        if let Some(ev) = &ev {
            for m in &ev.measurements {
                writeln!(
                    out,
                    "{}: main = {}, |N - main| = {}, bound = {} + {} sqrt({}){} -> {} (margin {})",
                    m.bound_id,
                    fraction(&m.main_num, &m.main_den),
                    fraction(&m.delta_num, &m.delta_den),
                    m.bound.a,
                    m.bound.b,
                    m.bound.q,
                    if m.bound.scale > 0 { format!(" / q^{}", m.bound.scale) } else { String::new() },
                    if m.holds { "holds" } else { "VIOLATED" },
                    m.margin
                )
                .ok();
            }
            if let Some(a) = ev.oracle_agrees {
                writeln!(out, "oracle agreement: {a}").ok();
            }
            for f in &failures {
                writeln!(out, "FAILED: {f}").ok();
            }
        }
    }
    Ok((code, out))
}

fn fraction(num: &BigInt, den: &BigInt) -> String {
    if *den == BigInt::from(1) {
        num.to_string()
    } else {
        format!("{num}/{den}")
    }
}

fn parse_main(text: &str) -> CliResult<MainTerm> {
    let bad = |e: String| Failure::usage(format!("bad --main {text:?}: {e}"));
    let (num, den) = match text.split_once('/') {
        Some((a, b)) => (a, b),
        None => (text, "1"),
    };
    let num = BigInt::from_str(num.trim()).map_err(|e| bad(e.to_string()))?;
    let den = BigInt::from_str(den.trim()).map_err(|e| bad(e.to_string()))?;
    if den <= BigInt::from(0) {
        return Err(bad("denominator must be positive".into()));
    }
    Ok(MainTerm(bounds::ratio(num, den)))
}

fn default_main(spec: &BoundSpec) -> Option<MainTerm> {
    match spec {
        BoundSpec::Main { q, n, .. }
        | BoundSpec::LinearF { q, n, .. }
        | BoundSpec::Deformed { q, n, .. }
        | BoundSpec::Carlitz { q, n, .. }
        | BoundSpec::Dickson { q, n, .. }
        | BoundSpec::Weil { q, n, .. }
        | BoundSpec::HomogeneousDiagonal { q, n, .. } => Some(MainTerm::q_power(*q, n.checked_sub(1)?)),
        BoundSpec::Ni { q, n, i, .. } => Some(MainTerm::q_power(*q, n.checked_sub(i + 1)?)),
        _ => None,
    }
}

fn cmd_bound(a: BoundArgs, json_out: bool) -> CliResult<(i32, String)> {
    let mut obj = Map::new();
    obj.insert("theorem".into(), json!(a.theorem));
    obj.insert("q".into(), json!(a.q));
    let mut put = |k: &str, v: Option<Value>| {
        if let Some(v) = v {
            obj.insert(k.into(), v);
        }
    };
    put("n", a.n.map(Value::from));
    put("m", a.m.map(Value::from));
    put("d", a.d.map(Value::from));
    put("delta", a.delta.map(Value::from));
    put("case", a.case.clone().map(Value::from));
    put("i", a.i.map(Value::from));
    put("a_zero", Some(Value::from(a.a_zero)));
    put("ambient", a.ambient.map(Value::from));
    put("s", a.s.map(Value::from));
    put("r", a.r.map(Value::from));
    put("k", a.k.map(Value::from));
    put("t", a.t.map(Value::from));
    put("ms", a.ms.clone().map(Value::from));
    put("ds", a.ds.clone().map(Value::from));
    // Missing fields surface as serde errors naming the key.
    let spec: BoundSpec = serde_json::from_value(Value::Object(obj))
        .map_err(|e| Failure::usage(format!("bound {}: {e}", a.theorem)))?;
    let bound = spec.evaluate()?;
    let mut out = String::new();
    let mut code = EXIT_OK;
    let verdict = match &a.count {
        None => None,
        Some(c) => {
            let n = BigUint::from_str(c).map_err(|e| Failure::usage(format!("bad --count {c:?}: {e}")))?;
            let main = match &a.main {
                Some(m) => parse_main(m)?,
                None => match spec {
                    BoundSpec::MhStar { q, n, .. } => bounds::mh_star_main(q, n, a.a_zero),
                    _ => default_main(&spec)
                        .ok_or_else(|| Failure::usage(format!("--main is required for {}", spec.id())))?,
                },
            };
            let v = bounds::check_bound(&BigInt::from(n), &main, &bound);
            if !v.holds {
                code = EXIT_VERIFY;
            }
            Some((main, v))
        }
    };
    if json_out {
        let mut doc = serde_json::to_value(&bound).expect("json");
        doc["theorem"] = json!(spec.id());
        if let Some((main, v)) = &verdict {
            doc["main"] = json!(fraction(main.numer(), main.denom()));
            doc["delta"] = json!(fraction(v.delta.numer(), v.delta.denom()));
            doc["holds"] = json!(v.holds);
            doc["margin"] = json!(v.margin);
        }
        writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("json")).ok();
    } else {
        write!(out, "{}: A = {}, B = {}, q = {}", spec.id(), bound.a, bound.b, bound.q).ok();
        if bound.scale > 0 {
            write!(out, ", divided by q^{}", bound.scale).ok();
        }
        writeln!(out).ok();
        if let Some((main, v)) = &verdict {
            writeln!(
                out,
                "main = {}, |N - main| = {} -> {} (margin {})",
                fraction(main.numer(), main.denom()),
                fraction(v.delta.numer(), v.delta.denom()),
                if v.holds { "holds" } else { "VIOLATED" },
                v.margin
            )
            .ok();
        }
    }
    Ok((code, out))
}

fn char_ok(q: u64, param: u64) -> CliResult<bool> {
    let (p, _) = arith::prime_power(q).ok_or_else(|| Failure::usage(format!("{q} is not a prime power")))?;
    Ok(!param.is_multiple_of(p))
}

fn cmd_exists(a: ExistsArgs, json_out: bool) -> CliResult<(i32, String)> {
    let mut out = String::new();
    let need_u = |v: Option<u64>, flag: &str| v.ok_or_else(|| Failure::usage(format!("--{flag} is required")));
    if a.criterion == Criterion::Felszeghy {
        let p = need_u(a.p.or(a.q), "p")?;
        if !arith::is_prime(p) {
            return Err(Failure::usage(format!("felszeghy needs a prime field, got {p}")));
        }
        let n = existence::felszeghy_n(p, need_u(a.m, "m")?)?;
        if json_out {
            writeln!(out, "{}", json!({"criterion": "felszeghy", "n": n})).ok();
        } else {
            writeln!(out, "{n}").ok();
        }
        return Ok((EXIT_OK, out));
    }
    let q = need_u(a.q.or(a.p), "q")?;
    let n = need_u(a.n, "n")?;
    let narrow = |v: u64, flag: &str| u32::try_from(v).map_err(|_| Failure::usage(format!("--{flag} too large")));
    let verdict = match a.criterion {
        Criterion::Deformed => {
            let m = need_u(a.m, "m")?;
            existence::exists_deformed(q, narrow(n, "n")?, narrow(m, "m")?, char_ok(q, m)?)
        }
        Criterion::Mh => {
            let m = need_u(a.m, "m")?;
            existence::exists_mh(q, n, m, char_ok(q, m)?, !a.a_zero)
        }
        Criterion::Carlitz => {
            let d = need_u(a.d, "d")?;
            existence::exists_carlitz(q, narrow(n, "n")?, narrow(d, "d")?, char_ok(q, d)?)
        }
        Criterion::Dickson => {
            let d = need_u(a.d, "d")?;
            existence::exists_dickson(q, narrow(n, "n")?, narrow(d, "d")?, char_ok(q, d)?)
        }
        Criterion::Felszeghy => unreachable!(),
    };
    let code = if verdict.premises_satisfied() { EXIT_OK } else { EXIT_HYPOTHESIS };
    if json_out {
        writeln!(out, "{}", serde_json::to_string_pretty(&verdict).expect("json")).ok();
    } else {
        for (name, holds) in &verdict.premises {
            if !holds {
                writeln!(out, "premise fails: {name}").ok();
            }
        }
        writeln!(out, "{}", if verdict.guaranteed { "guaranteed" } else { "not guaranteed" }).ok();
    }
    Ok((code, out))
}

fn cmd_waring(a: WaringArgs, json_out: bool) -> CliResult<(i32, String)> {
    // The ceiling is pure arithmetic in q, so a bare --q need not be a
    // prime power when no h is given.
    let q = match (a.field.q, &a.h) {
        (Some(q), None) if a.field.p.is_none() => q,
        _ => {
            let spec = a.field.spec()?;
            spec.p.pow(spec.k)
        }
    };
    let mut doc = Map::new();
    let mut out = String::new();
    let mut deg = a.d;
    if let Some(h) = &a.h {
        let ctx = FieldCtx::from_spec(&a.field.spec()?)?;
        let h = UniPoly::from_indices(&ctx, h)?;
        deg = deg.or(h.degree().map(|d| d as u32));
        let g = existence::waring_exact(&ctx, &h, fqcount::Execution::default())?;
        match g {
            WaringNumber::Finite(n) => {
                doc.insert("gamma".into(), json!(n));
                writeln!(out, "{n}").ok();
            }
            WaringNumber::Unbounded => {
                doc.insert("gamma".into(), json!("unbounded"));
                writeln!(out, "unbounded").ok();
            }
        }
    }
    if a.ceiling {
        let d = deg.ok_or_else(|| Failure::usage("--ceiling needs --d or --h"))?;
        let c = existence::waring_bound_ceiling(q, d)?;
        doc.insert("ceiling".into(), json!(c.n));
        doc.insert("boundary_equal".into(), json!(c.boundary_equal));
        doc.insert("premise_holds".into(), json!(c.premise_holds));
        writeln!(
            out,
            "ceiling = {}{}{}",
            c.n,
            if c.boundary_equal { " (boundary equality)" } else { "" },
            if c.premise_holds { "" } else { " (premise q^(d-3) > (d+2)^(2(d-1)) fails)" }
        )
        .ok();
    }
    if doc.is_empty() {
        return Err(Failure::usage("pass --h and/or --ceiling"));
    }
    if json_out {
        out = format!("{}\n", Value::Object(doc));
    }
    Ok((EXIT_OK, out))
}

fn cmd_singular(args: InstanceArgs, json_out: bool) -> CliResult<(i32, String)> {
    let (ctx, inst) = build_instance(&args)?;
    let sys = RgSystem::from_instance(&ctx, &inst)?;
    let scan = geometry::singular_scan(&ctx, &sys, &CountConfig::default())?;
    let mut out = String::new();
    if json_out {
        writeln!(out, "{}", scan.to_json()).ok();
    } else {
        writeln!(out, "affine singular points: {}", scan.singular_affine.len()).ok();
        for p in &scan.singular_affine {
            let coords: Vec<String> = p.iter().map(|c| c.to_string()).collect();
            writeln!(out, "  ({})", coords.join(", ")).ok();
        }
        writeln!(out, "in Z1: {}, in Z2: {}", scan.z1, scan.z2).ok();
        writeln!(out, "singular points at infinity: {}", scan.singular_infinity).ok();
    }
    Ok((EXIT_OK, out))
}

fn cmd_sweep(a: SweepArgs, json_out: bool) -> CliResult<(i32, String)> {
    let mut spec: SweepSpec = serde_json::from_str(&read_file(&a.spec)?)
        .map_err(|e| Failure::usage(format!("bad sweep spec {}: {e}", a.spec)))?;
    if let Some(seed) = a.seed {
        spec.seed = seed;
    }
    let rows = harness::run_sweep(&spec);
    let fmt = if json_out { ReportFormat::Json } else { ReportFormat::Csv };
    let doc = harness::report(&rows, fmt);
    let failures = harness::verify(&rows);
    let code = if a.verify && !failures.is_empty() { EXIT_VERIFY } else { EXIT_OK };
    let mut out = String::new();
    match &a.out {
        Some(path) => {
            std::fs::write(path, &doc).map_err(|e| Failure::usage(format!("cannot write {path}: {e}")))?;
            writeln!(out, "{} rows written to {path}", rows.len()).ok();
        }
        None => out.push_str(&doc),
    }
    if code == EXIT_VERIFY {
        return Err(Failure {
            code,
            msg: format!("{} failing rows:\n{}", failures.len(), failures.join("\n")),
        });
    }
    Ok((code, out))
}
