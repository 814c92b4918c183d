//! Pluggable execution of independent jobs (homotopy columns, fibers).
//!
//! The core crate only ships the serial executor; a threaded one lives in
//! the std companion crate.

use alloc::boxed::Box;
use alloc::vec::Vec;
use core::any::Any;

pub type Output = Box<dyn Any + Send>;

/// A job maps an index to a type-erased result.
pub type Job<'a> = dyn Fn(usize) -> Output + Sync + 'a;

pub trait ColumnExecutor: Sync {
    /// Runs `job(0), …, job(n-1)` and returns the results in index order.
    fn run(&self, n: usize, job: &Job<'_>) -> Vec<Output>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Serial;

impl ColumnExecutor for Serial {
    fn run(&self, n: usize, job: &Job<'_>) -> Vec<Output> {
        (0..n).map(job).collect()
    }
}

/// Typed wrapper around [`ColumnExecutor::run`].
pub fn map_indexed<T: Send + 'static>(exec: &dyn ColumnExecutor, n: usize, f: impl Fn(usize) -> T + Sync) -> Vec<T> {
    let job = move |i: usize| -> Output { Box::new(f(i)) };
    exec.run(n, &job).into_iter().map(|b| *b.downcast::<T>().expect("executor returned a foreign type")).collect()
}
