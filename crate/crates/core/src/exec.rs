//! Data-parallel map helpers with a sequential fallback.
//!
//! With the default `parallel` feature, [`map`] fans the work out over the
//! rayon thread pool (bounded by `RAYON_NUM_THREADS`); without it, [`map`]
//! is plain iteration.  Both preserve input order, so results are
//! deterministic either way.  [`map_seq`] is always sequential and exists so
//! benchmarks can compare the two paths in the same build.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Applies `f` to every item, in parallel when the `parallel` feature is on.
pub fn map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
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

/// Sequential reference implementation of [`map`].
pub fn map_seq<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}
