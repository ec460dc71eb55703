//! Execution strategy for the data-parallel kernels.
//!
//! Every heavy loop takes an [`Execution`] so callers (and the benches) can
//! pick the rayon path or the plain sequential one. Without the `parallel`
//! feature both variants run sequentially. Reductions are over exact
//! integers, so results never depend on the schedule.

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Execution {
    Sequential,
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

/// Sum of `f(lo, hi)` over consecutive chunks `[lo, hi)` covering `[0, total)`.
pub fn sum_chunks<F>(exec: Execution, total: u64, chunk: u64, f: F) -> u64
where
    F: Fn(u64, u64) -> u64 + Sync + Send,
{
    let chunk = chunk.max(1);
    let nchunks = total.div_ceil(chunk);
    let run = |c: u64| {
        let lo = c * chunk;
        f(lo, (lo + chunk).min(total))
    };
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..nchunks).into_par_iter().map(run).sum()
        }
        _ => (0..nchunks).map(run).sum(),
    }
}

/// `(0..n).map(f).collect()`, order preserved.
pub fn map_indexed<T, F>(exec: Execution, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..n).into_par_iter().map(f).collect()
        }
        _ => (0..n).map(f).collect(),
    }
}

/// Runs `f` on a pool capped at `threads` workers (`None` keeps the global
/// pool).
pub fn install<R, F>(threads: Option<usize>, f: F) -> R
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    #[cfg(feature = "parallel")]
    if let Some(t) = threads {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build()
            .expect("thread pool");
        return pool.install(f);
    }
    let _ = threads;
    f()
}
