//! Execution strategy for the data-parallel inner loops (per-predicate
//! scans, per-table population, batch filtering).
//!
//! With the `parallel` feature off, [`Exec::Parallel`] runs sequentially.
//! Output order never depends on the strategy.

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
    /// Order-preserving map.
    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => items.par_iter().map(f).collect(),
            _ => items.iter().map(f).collect(),
        }
    }

    /// Order-preserving filter with a fallible predicate; the first error
    /// in input order wins.
    pub fn try_filter<T, E, F>(self, items: Vec<T>, pred: F) -> Result<Vec<T>, E>
    where
        T: Send + Sync,
        E: Send,
        F: Fn(&T) -> Result<bool, E> + Sync + Send,
    {
        let keep: Vec<Result<bool, E>> = self.map(&items, pred);
        let mut out = Vec::new();
        for (item, k) in items.into_iter().zip(keep) {
            if k? {
                out.push(item);
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strategies_agree() {
        let items: Vec<u32> = (0..1000).collect();
        let a = Exec::Sequential.map(&items, |x| x * 3);
        let b = Exec::Parallel.map(&items, |x| x * 3);
        assert_eq!(a, b);
    }

    #[test]
    fn first_error_wins() {
        let items: Vec<i32> = vec![1, -2, 3, -4];
        let r: Result<Vec<i32>, i32> =
            Exec::Parallel.try_filter(items, |x| if *x < 0 { Err(*x) } else { Ok(true) });
        assert_eq!(r, Err(-2));
    }
}
