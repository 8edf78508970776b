//! Data-parallel map helpers with a sequential fallback.
//!
//! All helpers preserve input order, so a computation that seeds each item
//! from its index gives identical output in either mode.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Exec {
    /// Parallel when the `parallel` feature is compiled in.
    #[default]
    Auto,
    Sequential,
    Parallel,
}

impl Exec {
    pub fn is_parallel(self) -> bool {
        match self {
            Exec::Sequential => false,
            Exec::Auto | Exec::Parallel => cfg!(feature = "parallel"),
        }
    }
}

/// `f(i)` for `i in 0..n`, in order.
pub fn map_range<R, F>(exec: Exec, n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = exec;
    (0..n).map(f).collect()
}

/// `f(item)` for each item of a slice, in order.
pub fn map_slice<T, R, F>(exec: Exec, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    let _ = exec;
    items.iter().map(f).collect()
}

/// Sum of `f(i)` over `0..n`. Chunked so the floating-point result does not
/// depend on the execution mode.
pub fn sum_range<F>(exec: Exec, n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    const CHUNK: usize = 1024;
    let chunks = n.div_ceil(CHUNK);
    let partial = map_range(exec, chunks, |c| {
        let lo = c * CHUNK;
        let hi = (lo + CHUNK).min(n);
        (lo..hi).map(&f).sum::<f64>()
    });
    partial.into_iter().sum()
}

/// Caps the global worker pool. Has no effect without the `parallel`
/// feature or after the pool has been initialised.
pub fn set_thread_cap(threads: usize) -> bool {
    #[cfg(feature = "parallel")]
    {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads.max(1))
            .build_global()
            .is_ok()
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree() {
        let f = |i: usize| (i as f64).sqrt();
        let a = map_range(Exec::Sequential, 5000, f);
        let b = map_range(Exec::Parallel, 5000, f);
        assert_eq!(a, b);
        let s1 = sum_range(Exec::Sequential, 5000, f);
        let s2 = sum_range(Exec::Parallel, 5000, f);
        assert_eq!(s1.to_bits(), s2.to_bits());
    }
}
