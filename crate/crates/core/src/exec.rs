//! Execution strategy for the data-parallel inner loops.
//!
//! Every per-element sweep in the crate goes
//! through the helpers here. With the `parallel` feature (on by default) the
//! [`Exec::Parallel`] strategy dispatches onto the rayon pool; without it,
//! both strategies run the same sequential loop. Results are always collected
//! in index order, so the choice never changes outputs, only wall time.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Exec {
    Sequential,
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

impl Exec {
    /// Whether this strategy actually fans out (false when the feature is off).
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }

    /// Evaluates `f(0..n)` and collects the results in index order.
    pub fn map<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Exec::Parallel {
            return (0..n).into_par_iter().map(f).collect();
        }
        (0..n).map(f).collect()
    }

    /// Applies `f` to every element together with its index.
    pub fn for_each_mut<T, F>(self, items: &mut [T], f: F)
    where
        T: Send,
        F: Fn(usize, &mut T) + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Exec::Parallel {
            items.par_iter_mut().enumerate().for_each(|(i, x)| f(i, x));
            return;
        }
        items.iter_mut().enumerate().for_each(|(i, x)| f(i, x));
    }

    /// Like [`Exec::for_each_mut`], but sums the values returned by `f`.
    pub fn sum_mut<T, F>(self, items: &mut [T], f: F) -> usize
    where
        T: Send,
        F: Fn(usize, &mut T) -> usize + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Exec::Parallel {
            return items.par_iter_mut().enumerate().map(|(i, x)| f(i, x)).sum();
        }
        items.iter_mut().enumerate().map(|(i, x)| f(i, x)).sum()
    }

    /// Maps every index to a batch and concatenates the batches in order.
    pub fn flat_map<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> Vec<T> + Sync + Send,
    {
        self.map(n, f).into_iter().flatten().collect()
    }
}
