//! Worker pools and order-preserving parallel maps.
//!
//! Every parallel loop in the crate is an indexed map whose results are
//! collected in input order and reduced serially afterwards, so outputs do
//! not depend on the number of workers.

use rayon::prelude::*;

use crate::{FieldError, Result};

/// A sized worker pool. Work submitted through [`Executor::install`] (or
/// the crate's own parallel maps called inside it) runs on this pool.
#[derive(Debug)]
pub struct Executor {
    pool: rayon::ThreadPool,
}

impl Executor {
    /// `workers = 0` picks the number of available cores.
    pub fn new(workers: usize) -> Result<Self> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| FieldError::InvalidParameter(format!("cannot start worker pool: {e}")))?;
        Ok(Executor { pool })
    }

    pub fn workers(&self) -> usize {
        self.pool.current_num_threads()
    }

    pub fn install<R: Send>(&self, op: impl FnOnce() -> R + Send) -> R {
        self.pool.install(op)
    }

    pub fn map<T: Sync, R: Send>(&self, items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
        self.install(|| ordered_map(items, f))
    }
}

/// Parallel map over a slice, results in input order.
pub fn ordered_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    items.par_iter().map(f).collect()
}

/// Parallel map over `0..n`, results in index order.
pub fn ordered_map_range<R: Send>(n: usize, f: impl Fn(usize) -> R + Sync + Send) -> Vec<R> {
    (0..n).into_par_iter().map(f).collect()
}

/// Fallible ordered map; the first error in index order wins.
pub fn try_ordered_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> Result<R> + Sync + Send) -> Result<Vec<R>> {
    ordered_map(items, f).into_iter().collect()
}
