//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature (default) the [`ExecMode::Parallel`] paths run
//! on rayon; without it every call degrades to the sequential loop. Callers
//! must produce results that are independent of scheduling, which the
//! library guarantees by deriving any per-item randomness from the item
//! index.

/// Execution mode for embarrassingly parallel loops.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExecMode {
    /// Use the rayon thread pool when the `parallel` feature is enabled.
    Parallel,
    /// Plain sequential iteration.
    Sequential,
}

#[cfg(feature = "parallel")]
pub fn map_indexed<T, F>(n: usize, mode: ExecMode, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    match mode {
        ExecMode::Parallel => (0..n).into_par_iter().map(f).collect(),
        ExecMode::Sequential => (0..n).map(f).collect(),
    }
}

#[cfg(not(feature = "parallel"))]
pub fn map_indexed<T, F>(n: usize, _mode: ExecMode, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}
