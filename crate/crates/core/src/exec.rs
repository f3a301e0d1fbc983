//! Execution strategy for batch work.
//!
//! Every batch operation in the crate (decoding many streams, scoring a
//! corpus, trimming a corpus) goes through [`Exec`]. With the `parallel`
//! feature enabled, [`Exec::Parallel`] fans out over the rayon global pool;
//! without it, both variants run on the calling thread. Output order always
//! matches input order.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
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
    /// Whether this strategy actually runs on more than one thread.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }

    pub fn map<T, U, F>(self, items: &[T], f: F) -> Vec<U>
    where
        T: Sync,
        U: Send,
        F: Fn(&T) -> U + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Exec::Parallel {
            return items.par_iter().map(f).collect();
        }
        items.iter().map(f).collect()
    }

    pub fn map_range<U, F>(self, n: usize, f: F) -> Vec<U>
    where
        U: Send,
        F: Fn(usize) -> U + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Exec::Parallel {
            return (0..n).into_par_iter().map(f).collect();
        }
        (0..n).map(f).collect()
    }

    /// Map then fold with an associative `combine`. `identity` must be a
    /// neutral element of `combine`.
    pub fn map_reduce<T, U, F, I, C>(self, items: &[T], f: F, identity: I, combine: C) -> U
    where
        T: Sync,
        U: Send,
        F: Fn(&T) -> U + Sync + Send,
        I: Fn() -> U + Sync + Send,
        C: Fn(U, U) -> U + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Exec::Parallel {
            return items.par_iter().map(f).reduce(identity, combine);
        }
        items.iter().map(f).fold(identity(), combine)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_preserves_order() {
        let items: Vec<u32> = (0..10_000).collect();
        for exec in [Exec::Sequential, Exec::Parallel] {
            let out = exec.map(&items, |x| x * 2);
            assert!(out.iter().enumerate().all(|(i, &v)| v == 2 * i as u32));
        }
    }

    #[test]
    fn map_reduce_agrees_across_strategies() {
        let items: Vec<u64> = (1..=1000).collect();
        let seq = Exec::Sequential.map_reduce(&items, |x| x * x, || 0, |a, b| a + b);
        let par = Exec::Parallel.map_reduce(&items, |x| x * x, || 0, |a, b| a + b);
        assert_eq!(seq, par);
        assert_eq!(seq, 1000 * 1001 * 2001 / 6);
    }
}
