//! Data-parallel helpers with a sequential fallback.
//!
//! Every helper takes an [`ExecMode`]. With the `parallel` feature disabled,
//! `ExecMode::Parallel` silently runs sequentially, so call sites never need
//! `cfg` guards. Results are identical in both modes: work is split per item
//! and reductions are order-independent (min/max/all) or collected in order.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Execution strategy for the inner loops.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExecMode {
    Sequential,
    #[default]
    Parallel,
}

impl ExecMode {
    /// Whether this build can actually run work in parallel.
    pub fn parallel_available() -> bool {
        cfg!(feature = "parallel")
    }
}

/// Ordered map over an index range.
pub fn map_range<T, F>(mode: ExecMode, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match mode {
        #[cfg(feature = "parallel")]
        ExecMode::Parallel => (0..n).into_par_iter().map(f).collect(),
        _ => (0..n).map(f).collect(),
    }
}

/// Ordered map over a slice.
pub fn map_slice<S, T, F>(mode: ExecMode, items: &[S], f: F) -> Vec<T>
where
    S: Sync,
    T: Send,
    F: Fn(&S) -> T + Sync + Send,
{
    match mode {
        #[cfg(feature = "parallel")]
        ExecMode::Parallel => items.par_iter().map(f).collect(),
        _ => items.iter().map(f).collect(),
    }
}

/// Minimum of `f` over a slice; `f64::INFINITY` when empty.
pub fn min_slice<S, F>(mode: ExecMode, items: &[S], f: F) -> f64
where
    S: Sync,
    F: Fn(&S) -> f64 + Sync + Send,
{
    match mode {
        #[cfg(feature = "parallel")]
        ExecMode::Parallel => items.par_iter().map(f).reduce(|| f64::INFINITY, f64::min),
        _ => items.iter().map(f).fold(f64::INFINITY, f64::min),
    }
}

/// Maximum of `f` over a slice; `f64::NEG_INFINITY` when empty.
pub fn max_slice<S, F>(mode: ExecMode, items: &[S], f: F) -> f64
where
    S: Sync,
    F: Fn(&S) -> f64 + Sync + Send,
{
    match mode {
        #[cfg(feature = "parallel")]
        ExecMode::Parallel => items
            .par_iter()
            .map(f)
            .reduce(|| f64::NEG_INFINITY, f64::max),
        _ => items.iter().map(f).fold(f64::NEG_INFINITY, f64::max),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64).collect();
        for mode in [ExecMode::Sequential, ExecMode::Parallel] {
            assert_eq!(min_slice(mode, &xs, |x| *x), 0.0);
            assert_eq!(max_slice(mode, &xs, |x| *x), 100.0);
            let sq = map_range(mode, 5, |i| i * i);
            assert_eq!(sq, vec![0, 1, 4, 9, 16]);
        }
        assert_eq!(min_slice(ExecMode::Parallel, &[] as &[f64], |x| *x), f64::INFINITY);
    }
}
