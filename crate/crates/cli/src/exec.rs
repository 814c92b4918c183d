//! Threaded column executor.

use std::num::NonZeroUsize;
use std::thread;

use resurgence_core::exec::{ColumnExecutor, Job, Output};

pub const THREADS_VAR: &str = "RESURGENCE_NUM_THREADS";

/// Runs jobs on up to `threads` scoped worker threads. Each worker takes a
/// contiguous block of indices, so results do not depend on scheduling.
#[derive(Debug, Clone, Copy)]
pub struct Threaded {
    threads: usize,
}

impl Threaded {
    pub fn new(threads: usize) -> Self {
        Self { threads: threads.max(1) }
    }

    /// Worker count from `RESURGENCE_NUM_THREADS`, else the available
    /// parallelism.
    pub fn from_env() -> Self {
        let available = thread::available_parallelism().map(NonZeroUsize::get).unwrap_or(1);
        let cap = std::env::var(THREADS_VAR).ok().and_then(|v| v.trim().parse::<usize>().ok());
        Self::new(cap.map_or(available, |c| c.min(available).max(1)))
    }

    pub fn threads(&self) -> usize {
        self.threads
    }
}

impl ColumnExecutor for Threaded {
    fn run(&self, n: usize, job: &Job<'_>) -> Vec<Output> {
        if self.threads == 1 || n < 2 {
            return (0..n).map(job).collect();
        }
        let chunk = n.div_ceil(self.threads);
        thread::scope(|scope| {
            let handles: Vec<_> = (0..n)
                .step_by(chunk)
                .map(|lo| {
                    let hi = (lo + chunk).min(n);
                    scope.spawn(move || (lo..hi).map(job).collect::<Vec<_>>())
                })
                .collect();
            handles.into_iter().flat_map(|h| h.join().unwrap_or_else(|e| std::panic::resume_unwind(e))).collect()
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use resurgence_core::exec::map_indexed;

    #[test]
    fn order_is_preserved() {
        let v = map_indexed(&Threaded::new(3), 10, |i| i * 2);
        assert_eq!(v, (0..10).map(|i| i * 2).collect::<Vec<_>>());
        assert!(map_indexed(&Threaded::new(4), 0, |i| i).is_empty());
    }
}
