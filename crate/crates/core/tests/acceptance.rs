//! Acceptance criteria 1-9. Each test prints one `criterion N: PASS|FAIL`
//! line before asserting. Run with `--nocapture` to see them.

use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};

use fqcount::arith;
use fqcount::bounds::{self, MainTerm, SqrtBound};
use fqcount::counter::{
    self, CountConfig, Family, MarkoffHurwitz, MhLedger, MhMethod, MhMode,
};
use fqcount::existence::{self, WaringNumber};
use fqcount::geometry::{self, RgSystem};
use fqcount::harness::{self, CounterSelection, GMode, RowStatus, SweepSpec};
use fqcount::rng::SplitMix64;
use fqcount::{Execution, FieldCtx, FieldElement, SparsePoly, Term, UniPoly};

fn verdict(n: u32, ok: bool, detail: &str) {
    println!("criterion {n}: {} ({detail})", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {n} failed: {detail}");
}

fn cfg() -> CountConfig {
    CountConfig::default()
}

fn rand_elem(ctx: &FieldCtx, rng: &mut SplitMix64) -> FieldElement {
    ctx.elem_unchecked(rng.below(ctx.q()))
}

fn rand_nonzero(ctx: &FieldCtx, rng: &mut SplitMix64) -> FieldElement {
    ctx.elem_unchecked(rng.range(1, ctx.q() - 1))
}

fn rand_uni(ctx: &FieldCtx, max_deg: u64, rng: &mut SplitMix64) -> UniPoly {
    let d = rng.range(1, max_deg);
    let mut c: Vec<FieldElement> = (0..d).map(|_| rand_elem(ctx, rng)).collect();
    c.push(rand_nonzero(ctx, rng));
    UniPoly::new(c)
}

/// `sum_i h_i(X_i) - t` as a sparse polynomial.
fn separable_poly(ctx: &FieldCtx, hs: &[UniPoly], t: FieldElement) -> SparsePoly {
    let n = hs.len();
    let mut r = SparsePoly::constant(n, ctx.neg(t));
    for (i, h) in hs.iter().enumerate() {
        r = r.add(ctx, &h.to_sparse(ctx, n, i)).unwrap();
    }
    r
}

fn b(x: u64) -> BigUint {
    BigUint::from(x)
}

const SMALL_Q: [u64; 6] = [3, 4, 5, 7, 8, 9];

#[test]
fn criterion_1_oracle_equivalence() {
    let start = Instant::now();
    let mut rng = SplitMix64::new(0x5eed_0001);
    let mut mismatches = Vec::new();
    let mut total = 0;
    for idx in 0..200 {
        let q = SMALL_Q[idx % SMALL_Q.len()];
        let n = 2 + (idx / SMALL_Q.len()) % 3;
        let ctx = FieldCtx::from_q(q).unwrap();
        let hs: Vec<UniPoly> = (0..n).map(|_| rand_uni(&ctx, 4, &mut rng)).collect();
        let t = rand_elem(&ctx, &mut rng);
        let fast = counter::separable_count(&ctx, &hs, t, &cfg()).unwrap();
        let brute = counter::brute_count(&ctx, &separable_poly(&ctx, &hs, t), &cfg()).unwrap();
        if fast != brute {
            mismatches.push(format!("q={q} n={n} #{idx}: {fast} vs {brute}"));
        }
        total += 1;
    }
    let elapsed = start.elapsed();
    verdict(
        1,
        mismatches.is_empty() && elapsed < Duration::from_secs(60),
        &format!("{total} instances, {} mismatches, {elapsed:.2?}", mismatches.len()),
    );
}

fn brute_nonzero(ctx: &FieldCtx, r: &SparsePoly) -> u64 {
    let ev = counter::Evaluator::new(ctx, r);
    counter::count_points(ctx, r.nvars(), &cfg(), |x| {
        x.iter().all(|v| !v.is_zero()) && ev.eval(x).is_zero()
    })
    .unwrap()
}

fn ledger_consistent(ctx: &FieldCtx, inst: &MarkoffHurwitz, l: &MhLedger) -> Result<(), String> {
    let r = inst.polynomial(ctx);
    let full = counter::brute_count(ctx, &r, &cfg()).unwrap();
    let nonzero = b(brute_nonzero(ctx, &r));
    if l.full != full || l.nonzero != nonzero {
        return Err(format!("ledger ({}, {}) vs brute ({full}, {nonzero})", l.full, l.nonzero));
    }
    // Inclusion-exclusion over the fixed zero patterns.
    let mut ie = BigInt::from(0);
    for (i, counts) in l.by_size.iter().enumerate() {
        let s: BigInt = counts.iter().map(|c| BigInt::from(c.clone())).sum();
        if i % 2 == 0 {
            ie += s;
        } else {
            ie -= s;
        }
    }
    if BigInt::from(l.full.clone()) != BigInt::from(l.nonzero.clone()) + &ie {
        return Err(format!("full {} != nonzero {} + IE {ie}", l.full, l.nonzero));
    }
    if l.uniform && l.binomial.as_ref() != Some(&ie) {
        return Err(format!("binomial {:?} != IE {ie}", l.binomial));
    }
    Ok(())
}

#[test]
fn criterion_2_mh_ledger_identity() {
    let mut problems = Vec::new();

    // The worked F_3 example: n = 3, m = 2, a = b = 1, k = (1, 1, 1).
    let f3 = FieldCtx::prime(3).unwrap();
    let worked = MarkoffHurwitz {
        coeffs: vec![f3.one(); 3],
        m: 2,
        a: f3.one(),
        b: f3.one(),
        k: vec![1, 1, 1],
    };
    let l = counter::mh_ledger(&f3, &worked, MhMethod::Auto, &cfg()).unwrap();
    if (l.full.clone(), l.nonzero.clone(), l.with_zero.clone()) != (b(16), b(4), b(12)) {
        problems.push(format!("worked example: {} {} {}", l.full, l.nonzero, l.with_zero));
    }

    let mut rng = SplitMix64::new(0x5eed_0002);
    let mut uniform = 0;
    for idx in 0..100 {
        let q = [3, 5, 7][idx % 3];
        let n = 3 + (idx / 3) % 2;
        let ctx = FieldCtx::prime(q).unwrap();
        let mut k = vec![1u32; n];
        for _ in 0..rng.below(2) {
            k[rng.below(n as u64) as usize] += 1;
        }
        let sum_k: u32 = k.iter().sum();
        let m = sum_k + 1 + rng.below(2) as u32;
        // Equal a_i on every other instance so the binomial form gets used.
        let coeffs = if idx % 2 == 0 {
            vec![rand_nonzero(&ctx, &mut rng); n]
        } else {
            (0..n).map(|_| rand_nonzero(&ctx, &mut rng)).collect()
        };
        let inst = MarkoffHurwitz {
            coeffs,
            m,
            a: rand_elem(&ctx, &mut rng),
            b: rand_nonzero(&ctx, &mut rng),
            k,
        };
        let l = counter::mh_ledger(&ctx, &inst, MhMethod::Auto, &cfg()).unwrap();
        if l.uniform {
            uniform += 1;
        }
        if let Err(e) = ledger_consistent(&ctx, &inst, &l) {
            problems.push(format!("q={q} n={n} #{idx}: {e}"));
        }
        let joint = counter::mh_nonzero(&ctx, &inst, MhMethod::Joint, &cfg()).unwrap();
        if joint != l.nonzero {
            problems.push(format!("q={q} n={n} #{idx}: joint N* {joint} vs {}", l.nonzero));
        }
        let full = counter::mh_counts(&ctx, &inst, MhMode::Full, &cfg()).unwrap();
        if full != l.full {
            problems.push(format!("q={q} n={n} #{idx}: mh_counts {full} vs {}", l.full));
        }
    }
    verdict(
        2,
        problems.is_empty() && uniform > 0,
        &format!("100 instances + worked example, {uniform} uniform, problems: {problems:?}"),
    );
}

fn prime_powers_upto(limit: u64) -> Vec<u64> {
    (2..=limit).filter(|&q| arith::prime_power(q).is_some()).collect()
}

fn sweep(family: Family, q: Vec<u64>, n: Vec<usize>, param: Vec<u32>, instances: usize, g_mode: GMode, counter: CounterSelection) -> SweepSpec {
    SweepSpec {
        family,
        q,
        n,
        param,
        instances,
        seed: 0x5eed_0003,
        counter,
        bounds: Vec::new(),
        g_mode,
        brute_cap: None,
    }
}

/// The grid used by criteria 3 and 5.
fn bound_grid() -> Vec<SweepSpec> {
    let big = prime_powers_upto(199);
    let small = SMALL_Q.to_vec();
    let fast = CounterSelection::Fast;
    let both = CounterSelection::Both;
    vec![
        // Separable fast path up to q = 199.
        sweep(Family::DeformedDiagonal, big.clone(), vec![3, 4, 5], vec![2, 3, 4], 2, GMode::Constant, fast),
        sweep(Family::Diagonal, big.clone(), vec![3, 4, 5], vec![2, 3, 4], 2, GMode::Constant, fast),
        sweep(Family::Carlitz, big.clone(), vec![3, 4, 5], vec![2, 3, 4], 2, GMode::Constant, fast),
        sweep(Family::Dickson, big, vec![3, 4, 5], vec![2, 3, 4], 2, GMode::Constant, fast),
        // Brute-force families with random g, cross-checked against the oracle.
        sweep(Family::DeformedDiagonal, small.clone(), vec![2, 3, 4], vec![2, 3, 4, 5], 3, GMode::Random, both),
        sweep(Family::Carlitz, small.clone(), vec![2, 3, 4], vec![2, 3, 4], 3, GMode::Random, both),
        sweep(Family::Dickson, small.clone(), vec![2, 3, 4], vec![2, 3, 4], 3, GMode::Random, both),
        sweep(Family::MarkoffHurwitz, small, vec![3, 4], vec![4, 5, 6, 7], 3, GMode::Random, both),
    ]
}

#[test]
fn criterion_3_bound_sweeps() {
    let start = Instant::now();
    let mut rows = Vec::new();
    for spec in bound_grid() {
        rows.extend(harness::run_sweep(&spec));
    }
    let failures = harness::verify(&rows);
    let measured: usize = rows.iter().map(|r| r.measurements.len()).sum();
    let mut ids: Vec<&str> = rows
        .iter()
        .flat_map(|r| r.measurements.iter().map(|m| m.bound_id.as_str()))
        .map(|id| if id.starts_with("ni_") { "ni" } else { id })
        .collect();
    ids.sort_unstable();
    ids.dedup();
    let all_present = ["carlitz", "deformed", "dickson", "mh_star", "weil"]
        .iter()
        .all(|id| ids.contains(id));
    verdict(
        3,
        failures.is_empty() && all_present && measured > 0,
        &format!(
            "{} rows, {measured} verdicts, bounds {ids:?}, {} failures {:?}, {:.2?}",
            rows.len(),
            failures.len(),
            failures.iter().take(5).collect::<Vec<_>>(),
            start.elapsed()
        ),
    );
}

fn bound_is(bd: &SqrtBound, a: u64, bb: u64, q: u64) -> bool {
    bd.a == b(a) && bd.b == b(bb) && bd.q == q && bd.scale == 0
}

#[test]
fn criterion_4_bound_instantiation() {
    let mut problems = Vec::new();
    let mut check = |name: &str, ok: bool| {
        if !ok {
            problems.push(name.to_string());
        }
    };
    check("deformed(7,3,2)", bound_is(&bounds::bound_deformed(7, 3, 2).unwrap(), 2688, 14, 7));
    check("weil(7,3,2)", bound_is(&bounds::bound_weil_diagonal(7, 3, 2).unwrap(), 7, 1, 7));
    check("mh_star(3,3,2)", bound_is(&bounds::bound_mh_star(3, 3, 2).unwrap(), 0, 1344, 3));
    // q^{(n-1)/2} * 6(d+2)^n = 9 * 6 * 64 is 3456.
    check("carlitz(9,3,2)", bound_is(&bounds::bound_carlitz(9, 3, 2).unwrap(), 3456, 18, 9));
    check("mordell(5;2,2,2)", bound_is(&bounds::bound_mordell(5, &[2, 2, 2]).unwrap(), 0, 40, 5));
    check("deligne(7,1,3)", bound_is(&bounds::deligne_hypersurface_bound(7, 1, 3).unwrap(), 0, 4, 7));
    check(
        "mh main a != 0",
        bounds::mh_star_main(3, 3, false) == MainTerm::integer(3),
    );

    let mh = SqrtBound {
        a: b(0),
        b: b(1344),
        q: 3,
        scale: 0,
    };
    check("N=4 main=3 holds", bounds::check_bound(&BigInt::from(4), &MainTerm::integer(3), &mh).holds);
    let deformed = bounds::bound_deformed(7, 3, 2).unwrap();
    check("delta=100 holds", bounds::check_bound(&BigInt::from(149), &MainTerm::q_power(7, 2), &deformed).holds);
    let small = SqrtBound {
        a: b(2),
        b: b(1),
        q: 7,
        scale: 0,
    };
    check("delta=10 fails", !bounds::check_bound(&BigInt::from(10), &MainTerm::integer(0), &small).holds);
    verdict(4, problems.is_empty(), &format!("mismatches: {problems:?}"));
}

#[test]
fn criterion_5_existence_thresholds() {
    let mut problems = Vec::new();
    if !existence::exists_deformed(103, 5, 2, true).guaranteed {
        problems.push("exists_deformed(103,5,2) should hold".to_string());
    }
    if existence::exists_deformed(101, 5, 2, true).guaranteed {
        problems.push("exists_deformed(101,5,2) should not hold".to_string());
    }
    let mut guaranteed = 0;
    for spec in bound_grid() {
        for row in harness::run_sweep(&spec) {
            if row.existence_guaranteed == Some(true) {
                guaranteed += 1;
                match &row.count {
                    Some(c) if *c > b(0) => {}
                    other => problems.push(format!(
                        "{} q={} n={} param={} #{}: guaranteed but N = {other:?}",
                        row.family.name(),
                        row.q,
                        row.n,
                        row.param,
                        row.index
                    )),
                }
            }
        }
    }
    verdict(
        5,
        problems.is_empty() && guaranteed > 0,
        &format!("{guaranteed} guaranteed rows checked, problems: {problems:?}"),
    );
}

#[test]
fn criterion_6_waring() {
    let start = Instant::now();
    let mut problems = Vec::new();
    let seq = Execution::Sequential;
    for q in [5, 3] {
        let ctx = FieldCtx::prime(q).unwrap();
        let sq = UniPoly::from_indices(&ctx, &[0, 0, 1]).unwrap();
        let g = existence::waring_exact(&ctx, &sq, seq).unwrap();
        if g != WaringNumber::Finite(2) {
            problems.push(format!("gamma(T^2, {q}) = {g:?}"));
        }
    }
    let primes: Vec<u64> = (46657..).filter(|&p| arith::is_prime(p)).take(3).collect();
    let mut rng = SplitMix64::new(0x5eed_0006);
    let mut worst = 0;
    for &q in &primes {
        let ceiling = existence::waring_bound_ceiling(q, 4).unwrap();
        if !ceiling.premise_holds {
            problems.push(format!("premise fails at q={q}"));
        }
        let ctx = FieldCtx::prime(q).unwrap();
        for _ in 0..20 {
            let mut c: Vec<FieldElement> = (0..4).map(|_| rand_elem(&ctx, &mut rng)).collect();
            c.push(rand_nonzero(&ctx, &mut rng));
            let h = UniPoly::new(c);
            match existence::waring_exact(&ctx, &h, Execution::default()).unwrap() {
                WaringNumber::Finite(g) if g <= ceiling.n => worst = worst.max(g),
                other => problems.push(format!("q={q}: gamma = {other:?} > ceiling {}", ceiling.n)),
            }
        }
    }
    let elapsed = start.elapsed();
    verdict(
        6,
        problems.is_empty() && elapsed < Duration::from_secs(120),
        &format!("primes {primes:?}, max gamma {worst}, {elapsed:.2?}, problems: {problems:?}"),
    );
}

#[test]
fn criterion_7_geometry() {
    let mut problems = Vec::new();
    let (mut scans, mut points, mut z2_points) = (0, 0, 0);
    let mut rng = SplitMix64::new(0x5eed_0007);
    for q in SMALL_Q {
        let ctx = FieldCtx::from_q(q).unwrap();
        for n in 2..=4 {
            for m in 2..=5u32 {
                if ctx.char_divides(m as u64) {
                    continue;
                }
                for (i, mode) in [GMode::Random, GMode::Random, GMode::Constant].into_iter().enumerate() {
                    let inst = harness::generate_instance(&ctx, Family::DeformedDiagonal, n, m, mode, &mut rng).unwrap();
                    let sys = RgSystem::from_instance(&ctx, &inst).unwrap();
                    let tag = format!("q={q} n={n} m={m} #{i}");
                    let scan = match geometry::singular_scan(&ctx, &sys, &cfg()) {
                        Ok(s) => s,
                        Err(e) => {
                            problems.push(format!("{tag}: {e}"));
                            continue;
                        }
                    };
                    scans += 1;
                    points += scan.singular_affine.len();
                    z2_points += scan.z2;
                    let g_const = sys.g.is_constant();
                    for x in &scan.singular_affine {
                        let class = geometry::classify_point(&ctx, &sys, x).unwrap();
                        if g_const && !class.in_z1 {
                            // Only reachable when grad f vanishes at P(x); f is linear here.
                            problems.push(format!("{tag}: {x:?} not in Z1 with constant g"));
                        }
                        if !class.in_z1 && !class.in_z2 {
                            problems.push(format!("{tag}: {x:?} outside Z1 u Z2"));
                        }
                        if class.in_z2 && !class.in_z1 {
                            let gg: Vec<FieldElement> =
                                sys.g.gradient(&ctx).iter().map(|p| p.eval(&ctx, x).unwrap()).collect();
                            if gg.iter().all(|v| v.is_zero()) {
                                problems.push(format!("{tag}: grad g = 0 at Z2 point {x:?}"));
                            }
                        }
                    }
                    if BigUint::from(scan.singular_affine.len()) > scan.bezout_ceiling {
                        problems.push(format!("{tag}: {} points over ceiling", scan.singular_affine.len()));
                    }
                    if scan.singular_infinity != 0 {
                        problems.push(format!("{tag}: {} singular points at infinity", scan.singular_infinity));
                    }
                }
            }
        }
    }
    verdict(
        7,
        problems.is_empty(),
        &format!("{scans} scans, {points} singular points, {z2_points} in Z2, problems: {problems:?}"),
    );
}

fn random_form(ctx: &FieldCtx, n: usize, deg: u32, rng: &mut SplitMix64) -> SparsePoly {
    loop {
        let terms = (0..rng.range(1, 4))
            .map(|_| {
                let mut e = vec![0u32; n];
                for _ in 0..deg {
                    e[rng.below(n as u64) as usize] += 1;
                }
                Term {
                    c: rand_nonzero(ctx, rng),
                    e,
                }
            })
            .collect();
        let f = SparsePoly::from_terms(ctx, n, terms).unwrap();
        if !f.is_zero() {
            return f;
        }
    }
}

#[test]
fn criterion_8_projective_identity() {
    let mut problems = Vec::new();
    let mut rng = SplitMix64::new(0x5eed_0008);
    for idx in 0..50 {
        let q = SMALL_Q[idx % SMALL_Q.len()];
        let n = 2 + idx % 3;
        let deg = 1 + (idx / 3) as u32 % 4;
        let ctx = FieldCtx::from_q(q).unwrap();
        let form = random_form(&ctx, n, deg, &mut rng);
        let proj = counter::projective_count(&ctx, &form, &cfg()).unwrap();
        let affine = counter::brute_count(&ctx, &form, &cfg()).unwrap();
        if proj.clone() * b(q - 1) + b(1) != affine {
            problems.push(format!("form #{idx} over F_{q}: {proj}(q-1)+1 != {affine}"));
        }
    }
    let mut closures = 0;
    for q in SMALL_Q {
        let ctx = FieldCtx::from_q(q).unwrap();
        for family in [Family::DeformedDiagonal, Family::Carlitz, Family::Dickson] {
            for n in 2..=3 {
                let inst = harness::generate_instance(&ctx, family, n, 3, GMode::Random, &mut rng).unwrap();
                let r = inst.polynomial(&ctx).unwrap();
                if r.is_constant() {
                    continue;
                }
                let affine = counter::brute_count(&ctx, &r, &cfg()).unwrap();
                let inf = counter::count_at_infinity(&ctx, &r, &cfg()).unwrap();
                let top = counter::projective_count(&ctx, &r.top_degree_component().unwrap(), &cfg()).unwrap();
                let pcl = counter::pcl_count(&ctx, &r, &cfg()).unwrap();
                closures += 1;
                if inf != top || pcl != affine.clone() + inf.clone() {
                    problems.push(format!("{} over F_{q}: pcl {pcl}, affine {affine}, inf {inf}, top {top}", family.name()));
                }
            }
        }
    }
    verdict(
        8,
        problems.is_empty(),
        &format!("50 forms, {closures} closures, problems: {problems:?}"),
    );
}

#[test]
fn criterion_9_determinism() {
    let specs = [
        sweep(Family::DeformedDiagonal, vec![5, 7, 9], vec![3, 4], vec![2, 3], 4, GMode::Random, CounterSelection::Both),
        sweep(Family::MarkoffHurwitz, vec![5, 7], vec![3], vec![4, 5], 3, GMode::Random, CounterSelection::Both),
        sweep(Family::Carlitz, vec![31, 37], vec![3, 4], vec![2, 3], 3, GMode::Constant, CounterSelection::Fast),
    ];
    let mut differing = Vec::new();
    let mut rows = 0;
    for spec in &specs {
        let one = harness::run_sweep_with_threads(spec, Some(1));
        let four = harness::run_sweep_with_threads(spec, Some(4));
        rows += one.len();
        let (a, b) = (harness::report_csv(&one), harness::report_csv(&four));
        if a != b || one.iter().any(|r| r.status == RowStatus::Error) {
            differing.push(spec.family.name());
        }
    }
    verdict(
        9,
        differing.is_empty(),
        &format!("{rows} rows, 1 vs 4 threads, differing: {differing:?}"),
    );
}
