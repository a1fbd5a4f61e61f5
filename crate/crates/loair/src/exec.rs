//! Data-parallel execution helpers.
//!
//! Hot loops (Monte Carlo draws, per-example gradients, benchmark cells) go
//! through these functions. With the `parallel` feature (default) they run
//! on the rayon thread pool; without it they fall back to plain iterators.
//! The `*_seq` variants are always sequential and exist so benchmarks can
//! compare the two paths within one build.
//!
//! Results are collected in input order and chunk boundaries are fixed, so
//! output is bitwise identical whichever path runs and however many worker
//! threads exist.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Chunk size used when accumulating per-example values. Fixed (not derived
/// from the thread count) to keep floating-point summation order stable.
pub const ACCUM_CHUNK: usize = 8;

/// Map `f` over `items`, preserving order.
pub fn map_slice<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Sequential twin of [`map_slice`].
pub fn map_slice_seq<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    F: Fn(&T) -> R,
{
    items.iter().map(f).collect()
}

/// Map `f` over index ranges `[start, end)` chunked by [`ACCUM_CHUNK`],
/// preserving chunk order.
pub fn map_chunked<R, F>(len: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(std::ops::Range<usize>) -> R + Sync + Send,
{
    let ranges = chunk_ranges(len);
    #[cfg(feature = "parallel")]
    {
        ranges.into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        ranges.into_iter().map(f).collect()
    }
}

/// Sequential twin of [`map_chunked`].
pub fn map_chunked_seq<R, F>(len: usize, f: F) -> Vec<R>
where
    F: Fn(std::ops::Range<usize>) -> R,
{
    chunk_ranges(len).into_iter().map(f).collect()
}

fn chunk_ranges(len: usize) -> Vec<std::ops::Range<usize>> {
    (0..len)
        .step_by(ACCUM_CHUNK)
        .map(|s| s..(s + ACCUM_CHUNK).min(len))
        .collect()
}
