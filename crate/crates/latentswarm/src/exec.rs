//! Execution strategy for the crate's data-parallel loops.
//!
//! Fitness evaluation within a swarm generation and per-image batch
//! comparison are embarrassingly parallel and side-effect free, so they can
//! run on rayon without changing any result: outputs are always gathered in
//! index order. `ExecMode::Parallel` requires the `parallel` feature; without
//! it the variant silently degrades to the sequential loop.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// How to run an indexed map over independent work items.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExecMode {
    /// Plain single-threaded loop.
    Sequential,
    /// rayon work-stealing loop (`parallel` feature; falls back to
    /// sequential when the feature is disabled).
    Parallel,
}

impl Default for ExecMode {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            ExecMode::Parallel
        } else {
            ExecMode::Sequential
        }
    }
}

/// Maps `f` over `0..n`, collecting results in index order.
///
/// The output is identical for both modes; only wall time differs.
pub(crate) fn map_indexed<T, F>(mode: ExecMode, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match mode {
        ExecMode::Sequential => (0..n).map(f).collect(),
        #[cfg(feature = "parallel")]
        ExecMode::Parallel => (0..n).into_par_iter().map(f).collect(),
        #[cfg(not(feature = "parallel"))]
        ExecMode::Parallel => (0..n).map(f).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree() {
        let square = |i: usize| (i * i) as u64;
        let seq = map_indexed(ExecMode::Sequential, 100, square);
        let par = map_indexed(ExecMode::Parallel, 100, square);
        assert_eq!(seq, par);
    }

    #[test]
    fn empty_range() {
        let out: Vec<u8> = map_indexed(ExecMode::Parallel, 0, |_| 0u8);
        assert!(out.is_empty());
    }
}
