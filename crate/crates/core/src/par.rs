//! Data-parallel helpers.
//!
//! With the `parallel` feature (default) the per-node loops run on rayon;
//! without it they fall back to plain iterators. Reductions are always
//! summed in fixed-size chunks and folded in chunk order, so results are
//! bit-identical whatever the thread count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Runs `f` on a pool of `threads` workers, or on the global pool when
/// `None`. Without the `parallel` feature `f` simply runs on this thread.
pub fn install<R: Send>(threads: Option<usize>, f: impl FnOnce() -> R + Send) -> R {
    #[cfg(feature = "parallel")]
    if let Some(n) = threads {
        if let Ok(pool) = rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            return pool.install(f);
        }
    }
    #[cfg(not(feature = "parallel"))]
    let _ = threads;
    f()
}

/// Chunk length used by every reduction. Must not depend on the thread count.
const REDUCE_CHUNK: usize = 4096;

/// Evaluates `f` at every index in `0..len` and collects the results in order.
pub fn map_indices<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..len).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..len).map(f).collect()
    }
}

/// Applies `f(index, &mut item)` to every element of `items`.
pub fn for_each_indexed<T, F>(items: &mut [T], f: F)
where
    T: Send,
    F: Fn(usize, &mut T) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter_mut().enumerate().for_each(|(i, x)| f(i, x));
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter_mut().enumerate().for_each(|(i, x)| f(i, x));
    }
}

/// Deterministic sum of `f(i)` over `0..len`.
pub fn sum_indices<F>(len: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    let chunks = len.div_ceil(REDUCE_CHUNK);
    let partial = map_indices(chunks, |c| {
        let lo = c * REDUCE_CHUNK;
        let hi = (lo + REDUCE_CHUNK).min(len);
        let mut acc = 0.0;
        for i in lo..hi {
            acc += f(i);
        }
        acc
    });
    partial.into_iter().fold(0.0, |a, b| a + b)
}

/// Deterministic maximum of `f(i)` over `0..len`; `0.0` for an empty range.
pub fn max_indices<F>(len: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    let chunks = len.div_ceil(REDUCE_CHUNK);
    let partial = map_indices(chunks, |c| {
        let lo = c * REDUCE_CHUNK;
        let hi = (lo + REDUCE_CHUNK).min(len);
        (lo..hi).map(&f).fold(0.0_f64, f64::max)
    });
    partial.into_iter().fold(0.0, f64::max)
}

/// Deterministic minimum of `f(i)` over `0..len`; `+inf` for an empty range.
pub fn min_indices<F>(len: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    let chunks = len.div_ceil(REDUCE_CHUNK);
    let partial = map_indices(chunks, |c| {
        let lo = c * REDUCE_CHUNK;
        let hi = (lo + REDUCE_CHUNK).min(len);
        (lo..hi).map(&f).fold(f64::INFINITY, f64::min)
    });
    partial.into_iter().fold(f64::INFINITY, f64::min)
}

/// Deterministic dot product.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    sum_indices(a.len(), |i| a[i] * b[i])
}

/// `y += alpha * x`
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for_each_indexed(y, |i, yi| *yi += alpha * x[i]);
}
