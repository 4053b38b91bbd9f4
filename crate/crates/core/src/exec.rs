//! Execution mode for the data-parallel loops.
//!
//! Every parallel loop in the crate goes through [`fold_indices`], which
//! folds over an index range and combines partial results with an
//! associative, commutative reducer. Because the reducers used here
//! (integer sums, max/min with an explicit tie-break key) do not depend on
//! grouping, the result is identical for any thread count and for the
//! sequential path.
//!
//! Without the `parallel` feature, [`Exec::Parallel`] runs sequentially.

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    #[default]
    Parallel,
}

impl Exec {
    /// Whether this mode actually uses a thread pool in the current build.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }
}

/// Number of worker threads the parallel mode will use.
pub fn current_num_threads() -> usize {
    #[cfg(feature = "parallel")]
    return rayon::current_num_threads();

    #[cfg(not(feature = "parallel"))]
    return 1;
}

#[cfg_attr(not(feature = "parallel"), allow(unused_variables))]
pub(crate) fn fold_indices<A, R, ID, F, M, G>(
    exec: Exec,
    len: usize,
    identity: ID,
    fold: F,
    finish: M,
    reduce: G,
    empty: R,
) -> R
where
    A: Send,
    R: Send,
    ID: Fn() -> A + Sync + Send,
    F: Fn(A, usize) -> A + Sync + Send,
    M: Fn(A) -> R + Sync + Send,
    G: Fn(R, R) -> R + Sync + Send,
{
    if len == 0 {
        return empty;
    }
    if exec.is_parallel() {
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            return (0..len)
                .into_par_iter()
                .fold(&identity, &fold)
                .map(&finish)
                .reduce_with(&reduce)
                .unwrap_or(empty);
        }
    }
    finish((0..len).fold(identity(), fold))
}

/// Runs `f` on every index and collects the results in index order.
pub(crate) fn map_indices<T, F>(exec: Exec, len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    if exec.is_parallel() {
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            return (0..len).into_par_iter().map(f).collect();
        }
    }
    (0..len).map(f).collect()
}
