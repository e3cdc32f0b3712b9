//! Worker pool used for per-neuron and per-sample parallelism.
//!
//! Each neuron's weighted sum is always reduced by a single worker in input order,
//! so results do not depend on the worker count.

use std::sync::Arc;

use rayon::prelude::*;

use crate::{Error, Result};

/// Layers doing fewer multiply-adds than this run on the calling thread.
pub const DEFAULT_MIN_PARALLEL_WORK: usize = 1 << 14;

#[derive(Clone)]
pub struct Executor {
    workers: usize,
    pool: Option<Arc<rayon::ThreadPool>>,
    min_parallel_work: usize,
}

impl std::fmt::Debug for Executor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Executor")
            .field("workers", &self.workers)
            .field("min_parallel_work", &self.min_parallel_work)
            .finish()
    }
}

impl Default for Executor {
    fn default() -> Self {
        Executor::sequential()
    }
}

impl Executor {
    pub fn sequential() -> Self {
        Executor {
            workers: 1,
            pool: None,
            min_parallel_work: DEFAULT_MIN_PARALLEL_WORK,
        }
    }

    pub fn new(workers: usize) -> Result<Self> {
        if workers == 0 {
            return Err(Error::Config("worker count must be at least 1".into()));
        }
        if workers == 1 {
            return Ok(Executor::sequential());
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .thread_name(|i| format!("heartnet-worker-{i}"))
            .build()
            .map_err(|e| Error::Config(format!("cannot start {workers} workers: {e}")))?;
        Ok(Executor {
            workers,
            pool: Some(Arc::new(pool)),
            min_parallel_work: DEFAULT_MIN_PARALLEL_WORK,
        })
    }

    /// Sets the per-layer work size below which neurons are evaluated sequentially.
    /// Zero forces the parallel path for every layer.
    pub fn with_min_parallel_work(mut self, work: usize) -> Self {
        self.min_parallel_work = work;
        self
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    fn parallel_pool(&self, items: usize, work: usize) -> Option<&rayon::ThreadPool> {
        match &self.pool {
            Some(pool) if items > 1 && work >= self.min_parallel_work => Some(pool),
            _ => None,
        }
    }

    /// Writes `f(i)` into `out[i]` for every neuron `i`.
    pub(crate) fn fill_neurons<F>(&self, out: &mut [f64], cost_per_neuron: usize, f: F)
    where
        F: Fn(usize) -> f64 + Sync + Send,
    {
        match self.parallel_pool(out.len(), out.len() * cost_per_neuron) {
            Some(pool) => pool.install(|| {
                out.par_iter_mut()
                    .enumerate()
                    .for_each(|(i, slot)| *slot = f(i));
            }),
            None => out
                .iter_mut()
                .enumerate()
                .for_each(|(i, slot)| *slot = f(i)),
        }
    }

    /// Calls `f(i, row)` on each `row_len`-sized row of `data`.
    pub(crate) fn fill_rows<F>(&self, data: &mut [f64], row_len: usize, f: F)
    where
        F: Fn(usize, &mut [f64]) + Sync + Send,
    {
        if row_len == 0 {
            return;
        }
        let rows = data.len() / row_len;
        match self.parallel_pool(rows, data.len()) {
            Some(pool) => pool.install(|| {
                data.par_chunks_mut(row_len)
                    .enumerate()
                    .for_each(|(i, row)| f(i, row));
            }),
            None => data
                .chunks_mut(row_len)
                .enumerate()
                .for_each(|(i, row)| f(i, row)),
        }
    }

    /// Maps `0..n` through `f`, returning results in index order.
    ///
    /// Items run concurrently whenever more than one worker is available.
    pub fn map_ordered<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match &self.pool {
            Some(pool) if n > 1 => pool.install(|| (0..n).into_par_iter().map(&f).collect()),
            _ => (0..n).map(f).collect(),
        }
    }
}
