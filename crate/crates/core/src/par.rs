//! Rayon when the `parallel` feature is on, ordered sequential iteration otherwise.
//!
//! Callers only use `into_par_iter`/`par_iter` followed by order-preserving adapters
//! (`map`, `collect`, `find_map_first`), so both builds produce identical output.

#[cfg(feature = "parallel")]
pub use rayon::prelude::*;

#[cfg(not(feature = "parallel"))]
mod sequential {
    pub trait IntoParallelIterator {
        type Iter: Iterator<Item = Self::Item>;
        type Item;
        fn into_par_iter(self) -> Self::Iter;
    }

    impl<I: IntoIterator> IntoParallelIterator for I {
        type Iter = I::IntoIter;
        type Item = I::Item;
        fn into_par_iter(self) -> Self::Iter {
            self.into_iter()
        }
    }

    pub trait ParallelSlice<T> {
        fn par_iter(&self) -> std::slice::Iter<'_, T>;
    }

    impl<T> ParallelSlice<T> for [T] {
        fn par_iter(&self) -> std::slice::Iter<'_, T> {
            self.iter()
        }
    }

    pub trait FindMapFirst: Iterator + Sized {
        fn find_map_first<B, F>(mut self, f: F) -> Option<B>
        where
            F: FnMut(Self::Item) -> Option<B>,
        {
            self.find_map(f)
        }
    }

    impl<I: Iterator> FindMapFirst for I {}
}

#[cfg(not(feature = "parallel"))]
pub use sequential::*;

/// Whether this build runs sweeps on the rayon pool.
pub const fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}
