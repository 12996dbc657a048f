use rayon::prelude::*;

use crate::error::{GtError, Result};

/// Evaluates `f(0..n)` on a pool of `workers` threads (all cores when
/// `None`) and returns results in index order. Each item is computed
/// independently, so output never depends on the worker count.
pub fn map_indexed<R, F>(n: usize, workers: Option<usize>, f: F) -> Result<Vec<R>>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        if w == 0 {
            return Err(GtError::Config("worker count must be at least 1".into()));
        }
        builder = builder.num_threads(w);
    }
    let pool = builder
        .build()
        .map_err(|e| GtError::Config(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(|| (0..n).into_par_iter().map(f).collect()))
}
