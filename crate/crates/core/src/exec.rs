//! Execution strategy for the data-parallel loops (realizations, Pauli
//! sweeps, group averages).
//!
//! Every parallel map returns its results in index order and all reductions
//! happen sequentially afterwards, so the numbers do not depend on the
//! strategy or the thread count.

use std::ops::Range;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    #[cfg(feature = "parallel")]
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        #[cfg(feature = "parallel")]
        {
            Exec::Parallel
        }
        #[cfg(not(feature = "parallel"))]
        {
            Exec::Sequential
        }
    }
}

impl Exec {
    /// Evaluates `f` on every index of `range`, results in index order.
    pub fn map<T, F>(self, range: Range<usize>, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            Exec::Sequential => range.map(f).collect(),
            #[cfg(feature = "parallel")]
            Exec::Parallel => {
                use rayon::prelude::*;
                range.into_par_iter().map(f).collect()
            }
        }
    }

    /// Fills consecutive `chunk`-sized blocks of `out`; `f` receives the block
    /// index and the block.
    pub fn for_each_chunk<T, F>(self, out: &mut [T], chunk: usize, f: F)
    where
        T: Send,
        F: Fn(usize, &mut [T]) + Sync + Send,
    {
        match self {
            Exec::Sequential => out.chunks_mut(chunk).enumerate().for_each(|(i, c)| f(i, c)),
            #[cfg(feature = "parallel")]
            Exec::Parallel => {
                use rayon::prelude::*;
                out.par_chunks_mut(chunk)
                    .enumerate()
                    .for_each(|(i, c)| f(i, c))
            }
        }
    }

    /// Order-independent sum: partial results are collected in index order
    /// and added sequentially.
    pub fn sum<F>(self, range: Range<usize>, f: F) -> f64
    where
        F: Fn(usize) -> f64 + Sync + Send,
    {
        self.map(range, f).into_iter().sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strategies_agree_bitwise() {
        let f = |i: usize| (i as f64).sqrt().sin();
        let a = Exec::Sequential.sum(0..10_000, f);
        let b = Exec::default().sum(0..10_000, f);
        assert_eq!(a.to_bits(), b.to_bits());

        let mut x = vec![0usize; 100];
        let mut y = vec![0usize; 100];
        Exec::Sequential.for_each_chunk(&mut x, 7, |i, c| c.iter_mut().for_each(|v| *v = i));
        Exec::default().for_each_chunk(&mut y, 7, |i, c| c.iter_mut().for_each(|v| *v = i));
        assert_eq!(x, y);
    }
}
