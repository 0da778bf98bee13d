//! Worker plumbing: an order-preserving map over independent chunks of
//! work, parallel when the `parallel` feature is on and more than one
//! worker is requested, plain iteration otherwise.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

pub enum Executor {
    Sequential,
    #[cfg(feature = "parallel")]
    Pool(rayon::ThreadPool),
}

impl Executor {
    /// An executor over `workers` threads.  Zero or one means sequential,
    /// as does any request when the `parallel` feature is compiled out.
    pub fn new(workers: usize) -> Self {
        #[cfg(feature = "parallel")]
        if workers > 1 {
            if let Ok(pool) = rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
                return Executor::Pool(pool);
            }
        }
        let _ = workers;
        Executor::Sequential
    }

    pub fn workers(&self) -> usize {
        match self {
            Executor::Sequential => 1,
            #[cfg(feature = "parallel")]
            Executor::Pool(pool) => pool.current_num_threads(),
        }
    }

    /// Maps f over the items, returning results in input order.
    pub fn map<I, O, F>(&self, items: Vec<I>, f: F) -> Vec<O>
    where
        I: Send,
        O: Send,
        F: Fn(I) -> O + Sync + Send,
    {
        match self {
            Executor::Sequential => items.into_iter().map(f).collect(),
            #[cfg(feature = "parallel")]
            Executor::Pool(pool) => pool.install(|| items.into_par_iter().map(f).collect()),
        }
    }

    /// Like `map`, but stops at the first error.
    pub fn try_map<I, O, E, F>(&self, items: Vec<I>, f: F) -> Result<Vec<O>, E>
    where
        I: Send,
        O: Send,
        E: Send,
        F: Fn(I) -> Result<O, E> + Sync + Send,
    {
        match self {
            Executor::Sequential => items.into_iter().map(f).collect(),
            #[cfg(feature = "parallel")]
            Executor::Pool(pool) => pool.install(|| items.into_par_iter().map(f).collect()),
        }
    }
}
