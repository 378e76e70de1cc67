//! Batch execution backend.
//!
//! Instance generation, repair suites, sweeps, and Monte Carlo trials are all
//! independent per index, so they dispatch through [`run_indexed`]: rayon when
//! the `parallel` feature is enabled (the default), a plain loop otherwise.
//! [`run_indexed_seq`] is always the plain loop and stays available so
//! benchmarks can compare the two backends in one build.

#[cfg(feature = "parallel")]
pub fn run_indexed<T, F>(n: usize, job: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(job).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn run_indexed<T, F>(n: usize, job: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).map(job).collect()
}

/// Sequential reference backend with the same signature as [`run_indexed`].
pub fn run_indexed_seq<T, F>(n: usize, job: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).map(job).collect()
}
