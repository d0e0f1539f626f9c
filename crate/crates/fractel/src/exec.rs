//! Grid-loop execution. With the `parallel` feature (default), loops above a
//! size threshold run on the rayon pool; without it everything is sequential.
//! Both paths produce identical results: collection is index-ordered and the
//! only reductions are exact maxima.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Grids below this length are not worth a parallel dispatch.
#[cfg_attr(not(feature = "parallel"), allow(dead_code))]
pub(crate) const PAR_MIN_LEN: usize = 4096;

/// Lower bound on per-task chunk size; grid items are cheap, so fine
/// splitting costs more than it buys.
#[cfg_attr(not(feature = "parallel"), allow(dead_code))]
pub(crate) const PAR_MIN_CHUNK: usize = 1024;

pub(crate) fn map_vec<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if n >= PAR_MIN_LEN {
        return (0..n)
            .into_par_iter()
            .with_min_len(PAR_MIN_CHUNK)
            .map(f)
            .collect();
    }
    map_vec_seq(n, f)
}

pub(crate) fn map_vec_seq<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}

pub(crate) fn try_map_vec<T, E, F>(n: usize, f: F) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(usize) -> Result<T, E> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if n >= PAR_MIN_LEN {
        return (0..n)
            .into_par_iter()
            .with_min_len(PAR_MIN_CHUNK)
            .map(f)
            .collect();
    }
    try_map_vec_seq(n, f)
}

pub(crate) fn try_map_vec_seq<T, E, F>(n: usize, f: F) -> Result<Vec<T>, E>
where
    F: Fn(usize) -> Result<T, E>,
{
    (0..n).map(f).collect()
}

/// Maximum of f over 0..n; -inf for an empty range. Max is order-independent,
/// so the parallel reduction matches the sequential one exactly.
pub(crate) fn max_f64<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if n >= PAR_MIN_LEN {
        return (0..n)
            .into_par_iter()
            .with_min_len(PAR_MIN_CHUNK)
            .map(&f)
            .reduce(|| f64::NEG_INFINITY, f64::max);
    }
    max_f64_seq(n, f)
}

pub(crate) fn max_f64_seq<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64,
{
    (0..n).map(f).fold(f64::NEG_INFINITY, f64::max)
}
