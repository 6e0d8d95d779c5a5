//! Execution strategy for the data-parallel stages.
//!
//! With the `parallel` feature (default) work runs on a rayon pool; without it,
//! or with [`Execution::Sequential`], everything runs on the calling thread.
//! Results are always returned in input order, so output does not depend on
//! the strategy.

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    /// `None` uses rayon's global pool.
    Parallel(Option<usize>),
    #[default]
    Auto,
}

impl Execution {
    pub fn with_workers(workers: usize) -> Self {
        if workers <= 1 {
            Execution::Sequential
        } else {
            Execution::Parallel(Some(workers))
        }
    }

    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && !matches!(self, Execution::Sequential)
    }

    /// Applies `f` to every item, preserving order.
    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            match self {
                Execution::Sequential => items.iter().map(f).collect(),
                Execution::Auto | Execution::Parallel(None) => items.par_iter().map(f).collect(),
                Execution::Parallel(Some(n)) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
                    Ok(pool) => pool.install(|| items.par_iter().map(&f).collect()),
                    Err(_) => items.iter().map(f).collect(),
                },
            }
        }
        #[cfg(not(feature = "parallel"))]
        {
            items.iter().map(f).collect()
        }
    }
}
