//! Thin switch between rayon and sequential iteration.
//!
//! Every helper writes each output slot from exactly one closure call, so the
//! result does not depend on how the work is split.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Fill `out` in chunks of `chunk` elements, calling `f(chunk_index, chunk)`.
pub(crate) fn for_each_chunk_mut<T, F>(out: &mut [T], chunk: usize, parallel: bool, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    let chunk = chunk.max(1);
    #[cfg(feature = "parallel")]
    if parallel {
        out.par_chunks_mut(chunk)
            .enumerate()
            .for_each(|(i, c)| f(i, c));
        return;
    }
    let _ = parallel;
    out.chunks_mut(chunk).enumerate().for_each(|(i, c)| f(i, c));
}

/// Map `0..n` to a vector, preserving order.
pub(crate) fn map_range<T, F>(n: usize, parallel: bool, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if parallel {
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = parallel;
    (0..n).map(f).collect()
}

/// Whether the default code paths run in parallel.
pub(crate) const DEFAULT_PARALLEL: bool = cfg!(feature = "parallel");
