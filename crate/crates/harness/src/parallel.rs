//! The only place that spawns parallel work. Results always come back in
//! input order.

use rayon::prelude::*;

use crate::error::{HarnessError, HarnessResult};

/// Thread count from `PERMINV_THREADS`, if set.
pub fn env_threads() -> HarnessResult<Option<usize>> {
    match std::env::var("PERMINV_THREADS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n >= 1)
            .map(Some)
            .ok_or_else(|| HarnessError::Config(format!("PERMINV_THREADS: {v:?} is not a positive integer"))),
        Err(_) => Ok(None),
    }
}

/// Runs `f` inside a pool of `threads` workers (rayon's default if `None`).
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> HarnessResult<T> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        b = b.num_threads(n);
    }
    let pool = b.build().map_err(|e| HarnessError::Runtime(e.to_string()))?;
    Ok(pool.install(f))
}

/// `items.map(f)` in parallel, collected in order; the first error wins by
/// position.
pub fn map_ordered<T: Sync, U: Send, E: Send>(
    items: &[T],
    f: impl Fn(&T) -> Result<U, E> + Sync + Send,
) -> Result<Vec<U>, E> {
    items.par_iter().map(f).collect::<Vec<_>>().into_iter().collect()
}
