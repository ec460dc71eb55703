use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use fqcount::counter::{self, CountConfig, EquationInstance, MarkoffHurwitz, MhMethod};
use fqcount::harness::{self, CounterSelection, GMode, SweepSpec};
use fqcount::{Execution, FieldCtx, SparsePoly, UniPoly};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn brute(c: &mut Criterion) {
    let mut group = c.benchmark_group("brute_count");
    let ctx = FieldCtx::from_q(13).unwrap();
    let inst = EquationInstance::DeformedDiagonal {
        field: ctx.spec(),
        coeffs: vec![ctx.one(); 5],
        m: 3,
        g: SparsePoly::variable(5, 0),
    };
    let r = inst.polynomial(&ctx).unwrap();
    for (name, exec) in MODES {
        let cfg = CountConfig::with_exec(exec);
        group.bench_function(BenchmarkId::new(name, "q13_n5"), |b| {
            b.iter(|| counter::brute_count(&ctx, &r, &cfg).unwrap())
        });
    }
    group.finish();
}

fn separable(c: &mut Criterion) {
    let mut group = c.benchmark_group("separable_count");
    for q in [199u64, 4099] {
        let ctx = FieldCtx::from_q(q).unwrap();
        let h = UniPoly::from_indices(&ctx, &[1, 0, 3, 0, 1]).unwrap();
        let hs = vec![h; 6];
        for (name, exec) in MODES {
            let cfg = CountConfig::with_exec(exec);
            group.bench_function(BenchmarkId::new(name, q), |b| {
                b.iter(|| counter::separable_count(&ctx, &hs, ctx.one(), &cfg).unwrap())
            });
        }
    }
    group.finish();
}

fn mh_joint(c: &mut Criterion) {
    let mut group = c.benchmark_group("mh_nonzero_joint");
    let ctx = FieldCtx::from_q(101).unwrap();
    let inst = MarkoffHurwitz {
        coeffs: vec![ctx.one(); 4],
        m: 6,
        a: ctx.one(),
        b: ctx.one(),
        k: vec![1, 1, 1, 2],
    };
    for (name, exec) in MODES {
        let cfg = CountConfig::with_exec(exec);
        group.bench_function(BenchmarkId::new(name, "q101_n4"), |b| {
            b.iter(|| counter::mh_nonzero(&ctx, &inst, MhMethod::Joint, &cfg).unwrap())
        });
    }
    group.finish();
}

fn sweep(c: &mut Criterion) {
    let spec = SweepSpec {
        family: fqcount::counter::Family::DeformedDiagonal,
        q: vec![5, 7, 9],
        n: vec![3, 4],
        param: vec![2, 3],
        instances: 4,
        seed: 1,
        counter: CounterSelection::Both,
        bounds: Vec::new(),
        g_mode: GMode::Random,
        brute_cap: None,
    };
    let mut group = c.benchmark_group("sweep");
    for threads in [1usize, 4] {
        group.bench_function(BenchmarkId::new("threads", threads), |b| {
            b.iter(|| harness::run_sweep_with_threads(&spec, Some(threads)))
        });
    }
    group.finish();
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = brute, separable, mh_joint, sweep
}
criterion_main!(benches);
