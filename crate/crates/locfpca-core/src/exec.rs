//! Execution-mode switch: every data-parallel loop in the crate runs through
//! [`map_collect`], which dispatches to rayon when the `parallel` feature is
//! enabled and to a plain sequential map otherwise. Results are always
//! collected in index order, so both modes produce bit-identical output.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExecMode {
    Sequential,
    #[cfg(feature = "parallel")]
    Parallel,
}

impl Default for ExecMode {
    #[cfg(feature = "parallel")]
    fn default() -> Self {
        ExecMode::Parallel
    }
    #[cfg(not(feature = "parallel"))]
    fn default() -> Self {
        ExecMode::Sequential
    }
}

/// Map `f` over `0..n` and collect results in index order.
pub fn map_collect<T, F>(mode: ExecMode, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match mode {
        ExecMode::Sequential => (0..n).map(f).collect(),
        #[cfg(feature = "parallel")]
        ExecMode::Parallel => (0..n).into_par_iter().map(f).collect(),
    }
}

/// Map then reduce in fixed index order (left fold over the collected vector).
pub fn map_reduce<T, F, R, A>(mode: ExecMode, n: usize, f: F, init: A, reduce: R) -> A
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
    R: FnMut(A, T) -> A,
{
    map_collect(mode, n, f).into_iter().fold(init, reduce)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sequential_and_default_agree() {
        let a = map_collect(ExecMode::Sequential, 100, |i| (i as f64).sqrt());
        let b = map_collect(ExecMode::default(), 100, |i| (i as f64).sqrt());
        assert_eq!(a, b);
    }

    #[test]
    fn reduce_is_in_index_order() {
        let s = map_reduce(ExecMode::default(), 5, |i| i, Vec::new(), |mut acc, x| {
            acc.push(x);
            acc
        });
        assert_eq!(s, vec![0, 1, 2, 3, 4]);
    }
}
