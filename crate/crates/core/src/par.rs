//! Worker-pool control.

use crate::{Error, Result};

/// Runs `f` inside a dedicated rayon pool with exactly `threads` workers.
pub fn with_threads<T, F>(threads: usize, f: F) -> Result<T>
where
    F: FnOnce() -> T + Send,
    T: Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::ThreadPool(e.to_string()))?;
    Ok(pool.install(f))
}
