//! Execution strategy for the data-parallel loops in the engine.
//!
//! Every hot loop (column assembly, per-degree ranks, per-weight slices,
//! oracle sweeps) goes through [`Exec::map`]. With the `parallel` feature
//! enabled, [`Exec::Parallel`] fans out over the rayon global pool; without
//! it, both variants run sequentially so callers never need to `cfg` on the
//! feature themselves.

/// How to evaluate independent work items.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Exec {
    /// Evaluate items one after another on the calling thread.
    Sequential,
    /// Evaluate items on the rayon pool (sequential when the `parallel`
    /// feature is off).
    #[default]
    Parallel,
}

impl Exec {
    /// Whether this strategy actually runs on more than one thread.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }

    /// Map `f` over `items`, preserving order.
    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Exec::Parallel && items.len() > 1 {
            use rayon::prelude::*;
            return items.par_iter().map(f).collect();
        }
        items.iter().map(f).collect()
    }

    /// Map a fallible `f` over `items`, returning the first error in item
    /// order.
    pub fn try_map<T, R, E, F>(self, items: &[T], f: F) -> Result<Vec<R>, E>
    where
        T: Sync,
        R: Send,
        E: Send,
        F: Fn(&T) -> Result<R, E> + Sync + Send,
    {
        self.map(items, f).into_iter().collect()
    }
}
