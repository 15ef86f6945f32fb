//! Replica execution on a worker pool with index-keyed results.

use rayon::prelude::*;

use crate::HarnessError;

/// Overrides the default worker count when set to a positive integer.
pub const WORKERS_ENV: &str = "VOTERLAB_WORKERS";

/// Explicit request, else the environment, else the number of CPUs.
pub fn resolve_workers(requested: Option<usize>) -> usize {
    requested
        .or_else(|| std::env::var(WORKERS_ENV).ok().and_then(|v| v.trim().parse().ok()).filter(|&w| w > 0))
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Evaluates `job(0..count)` on `workers` threads. Output position `i` holds
/// the result of replica `i` whatever the completion order.
pub fn run_indexed<T, F>(workers: usize, count: usize, job: F) -> Result<Vec<T>, HarnessError>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build().map_err(|e| HarnessError::Pool(e.to_string()))?;
    Ok(pool.install(|| (0..count).into_par_iter().map(&job).collect()))
}

/// Like [`run_indexed`] for fallible jobs; reports the lowest failing index.
pub fn try_run_indexed<T, F>(workers: usize, count: usize, job: F) -> Result<Vec<T>, HarnessError>
where
    T: Send,
    F: Fn(usize) -> Result<T, HarnessError> + Sync + Send,
{
    run_indexed(workers, count, job)?.into_iter().collect()
}
