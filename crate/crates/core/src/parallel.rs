//! Thread-pool plumbing for the opt-in multithreaded pair loops.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::ThreadPool;

/// Raw pointer that may cross threads. Every user guarantees that concurrent
/// accesses through it touch disjoint indices.
pub(crate) struct SendPtr<T>(pub(crate) *mut T);

// SAFETY: used only for disjoint index sets, see the type docs.
unsafe impl<T: Send> Send for SendPtr<T> {}
// SAFETY: as above.
unsafe impl<T: Send> Sync for SendPtr<T> {}

impl<T> Clone for SendPtr<T> {
    fn clone(&self) -> Self {
        *self
    }
}
impl<T> Copy for SendPtr<T> {}

impl<T> SendPtr<T> {
    #[inline(always)]
    pub(crate) fn get(self) -> *mut T {
        self.0
    }
}

/// Returns a cached pool with exactly `threads` workers.
pub(crate) fn pool(threads: usize) -> Arc<ThreadPool> {
    static POOLS: OnceLock<Mutex<HashMap<usize, Arc<ThreadPool>>>> = OnceLock::new();
    let pools = POOLS.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = pools.lock().unwrap_or_else(|e| e.into_inner());
    guard
        .entry(threads)
        .or_insert_with(|| {
            Arc::new(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .thread_name(move |i| format!("svsim-{threads}-{i}"))
                    .build()
                    .expect("failed to build thread pool"),
            )
        })
        .clone()
}

/// Runs `body(start, end)` over `[0, total)` split into contiguous ranges.
/// With `threads <= 1` the whole range runs on the calling thread.
pub(crate) fn for_each_range<F>(total: usize, threads: usize, body: F)
where
    F: Fn(usize, usize) + Send + Sync,
{
    // Small loops are not worth the fork/join.
    const MIN_PER_THREAD: usize = 1 << 10;
    if threads <= 1 || total < 2 * MIN_PER_THREAD {
        body(0, total);
        return;
    }
    let n_chunks = (threads * 4).min(total / MIN_PER_THREAD).max(1);
    let chunk = total.div_ceil(n_chunks);
    pool(threads).scope(|s| {
        for c in 0..n_chunks {
            let start = c * chunk;
            let end = ((c + 1) * chunk).min(total);
            if start >= end {
                continue;
            }
            let body = &body;
            s.spawn(move |_| body(start, end));
        }
    });
}
