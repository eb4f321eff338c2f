//! Data-parallel kernels with a sequential fallback.
//!
//! With the `parallel` feature the kernels fan out over rayon; without it (or
//! after [`set_parallel(false)`](set_parallel)) they run on the calling thread.
//! Reductions always split the index range into fixed-size blocks and add the
//! block sums in order, so results are bit-identical in both modes and for
//! every thread count.

use std::ops::Range;
use std::sync::atomic::{AtomicBool, Ordering};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Block length used by reductions.
pub const REDUCE_BLOCK: usize = 4096;

static PARALLEL: AtomicBool = AtomicBool::new(true);

/// Enables or disables parallel execution at runtime (no-op without the
/// `parallel` feature).
pub fn set_parallel(enabled: bool) {
    PARALLEL.store(enabled, Ordering::Relaxed);
}

/// Whether kernels currently fan out over threads.
pub fn is_parallel() -> bool {
    cfg!(feature = "parallel") && PARALLEL.load(Ordering::Relaxed)
}

/// Parallel mode with more than one worker available.
#[cfg(feature = "parallel")]
fn fan_out() -> bool {
    is_parallel() && rayon::current_num_threads() > 1
}

/// Minimum number of elements handed to one task by the pointwise kernels.
#[cfg(feature = "parallel")]
const MIN_TASK_LEN: usize = 1024;

/// Applies `f` to every element with its index.
pub fn for_each_indexed<T, F>(data: &mut [T], f: F)
where
    T: Send,
    F: Fn(usize, &mut T) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if fan_out() {
        data.par_iter_mut().with_min_len(MIN_TASK_LEN).enumerate().for_each(|(i, x)| f(i, x));
        return;
    }
    data.iter_mut().enumerate().for_each(|(i, x)| f(i, x));
}

/// Applies `f` to consecutive chunks of length `chunk` with the chunk index.
pub fn for_each_chunk<T, F>(data: &mut [T], chunk: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if fan_out() {
        data.par_chunks_mut(chunk)
            .enumerate()
            .for_each(|(i, c)| f(i, c));
        return;
    }
    data.chunks_mut(chunk).enumerate().for_each(|(i, c)| f(i, c));
}

/// Deterministic sum of `f(range)` over fixed blocks covering `0..len`.
pub fn sum_blocks<F>(len: usize, f: F) -> f64
where
    F: Fn(Range<usize>) -> f64 + Sync + Send,
{
    let blocks = len.div_ceil(REDUCE_BLOCK);
    let range = |b: usize| b * REDUCE_BLOCK..((b + 1) * REDUCE_BLOCK).min(len);
    #[cfg(feature = "parallel")]
    if fan_out() && blocks > 1 {
        let partial: Vec<f64> = (0..blocks).into_par_iter().map(|b| f(range(b))).collect();
        return partial.iter().sum();
    }
    (0..blocks).map(|b| f(range(b))).sum()
}

/// Maps `f` over `items`, preserving order.
pub fn map_collect<I, O, F>(items: &[I], f: F) -> Vec<O>
where
    I: Sync,
    O: Send,
    F: Fn(&I) -> O + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if fan_out() {
        return items.par_iter().map(f).collect();
    }
    items.iter().map(f).collect()
}
