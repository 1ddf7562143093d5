//! Execution strategy for the data-parallel loops.
//!
//! With the `parallel` feature (on by default) work is spread over a rayon
//! pool; without it every strategy degrades to a sequential loop. Callers
//! always get results back in input order, so output never depends on
//! scheduling.

/// How independent per-item work is executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    /// Plain loop on the calling thread.
    Sequential,
    /// Rayon's global pool.
    #[default]
    Parallel,
    /// A dedicated pool with exactly this many worker threads.
    Threads(usize),
}

impl Execution {
    /// `Threads(1)` and `Sequential` are equivalent; zero threads means the
    /// global pool.
    pub fn from_threads(threads: Option<usize>) -> Self {
        match threads {
            None | Some(0) => Execution::Parallel,
            Some(1) => Execution::Sequential,
            Some(n) => Execution::Threads(n),
        }
    }

    /// Maps `f` over `items`, preserving order.
    pub fn map<T, R, F>(&self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        match self {
            Execution::Sequential => items.iter().map(f).collect(),
            #[cfg(feature = "parallel")]
            Execution::Parallel => par_map(items, f),
            #[cfg(feature = "parallel")]
            Execution::Threads(n) => match rayon::ThreadPoolBuilder::new().num_threads(*n).build() {
                Ok(pool) => pool.install(|| par_map(items, f)),
                Err(_) => items.iter().map(f).collect(),
            },
            #[cfg(not(feature = "parallel"))]
            _ => items.iter().map(f).collect(),
        }
    }
}

#[cfg(feature = "parallel")]
fn par_map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

/// Whether this build was compiled with rayon support.
pub const fn parallel_enabled() -> bool {
    cfg!(feature = "parallel")
}
