//! In-process parallel evaluation.
//!
//! Tasks are pure; results are reassembled by task index so the output never
//! depends on the worker count. A single worker is the sequential reference.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Environment variable overriding the worker count.
pub const WORKERS_ENV: &str = "POLYHH_WORKERS";

#[derive(Clone, Default)]
pub enum Executor {
    #[default]
    Sequential,
    Pool(Arc<rayon::ThreadPool>),
}

impl std::fmt::Debug for Executor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Executor({} workers)", self.workers())
    }
}

impl Executor {
    /// `workers <= 1` gives the sequential executor.
    pub fn new(workers: usize) -> Self {
        if workers <= 1 {
            return Executor::Sequential;
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .thread_name(|i| format!("polyhh-worker-{i}"))
            .build()
            .expect("thread pool");
        Executor::Pool(Arc::new(pool))
    }

    pub fn workers(&self) -> usize {
        match self {
            Executor::Sequential => 1,
            Executor::Pool(p) => p.current_num_threads(),
        }
    }

    /// Maps `f` over `items`, preserving order. Panics propagate.
    pub fn map<T, R, F>(&self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        match self {
            Executor::Sequential => items.iter().map(f).collect(),
            Executor::Pool(p) => p.install(|| items.par_iter().map(f).collect()),
        }
    }

    /// Like [`Executor::map`] but passes the index.
    pub fn map_indexed<T, R, F>(&self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(usize, &T) -> R + Sync + Send,
    {
        match self {
            Executor::Sequential => items.iter().enumerate().map(|(i, t)| f(i, t)).collect(),
            Executor::Pool(p) => {
                p.install(|| items.par_iter().enumerate().map(|(i, t)| f(i, t)).collect())
            }
        }
    }
}

/// Runs closures on `workers` threads and returns their results in task
/// order. A panicking task is reported as [`Error::TaskPanicked`] carrying
/// the lowest failing index.
pub fn parallel_map<R, F>(tasks: Vec<F>, workers: usize) -> Result<Vec<R>>
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    let exec = Executor::new(workers);
    let slots: Vec<std::sync::Mutex<Option<F>>> = tasks
        .into_iter()
        .map(|t| std::sync::Mutex::new(Some(t)))
        .collect();
    let results = exec.map_indexed(&slots, |_, slot| {
        let task = slot
            .lock()
            .expect("task slot")
            .take()
            .expect("task runs once");
        catch_unwind(AssertUnwindSafe(task)).map_err(|payload| {
            payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".to_string())
        })
    });
    results
        .into_iter()
        .enumerate()
        .map(|(index, r)| r.map_err(|message| Error::TaskPanicked { index, message }))
        .collect()
}

/// Worker count from `POLYHH_WORKERS`, falling back to `default`.
pub fn workers_from_env(default: usize) -> usize {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&w: &usize| w >= 1)
        .unwrap_or(default)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_task_list() {
        let tasks: Vec<fn() -> u32> = Vec::new();
        assert!(parallel_map(tasks, 4).unwrap().is_empty());
    }

    #[test]
    fn results_are_index_aligned() {
        let tasks: Vec<_> = (0..25u64).map(|i| move || i * i).collect();
        let out = parallel_map(tasks, 4).unwrap();
        assert_eq!(out, (0..25u64).map(|i| i * i).collect::<Vec<_>>());
    }

    #[test]
    fn panics_surface_as_errors() {
        let tasks: Vec<Box<dyn FnOnce() -> u32 + Send>> =
            vec![Box::new(|| 1), Box::new(|| panic!("boom")), Box::new(|| 3)];
        match parallel_map(tasks, 2) {
            Err(Error::TaskPanicked { index, message }) => {
                assert_eq!(index, 1);
                assert!(message.contains("boom"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn executor_map_matches_sequential() {
        let items: Vec<u64> = (0..100).collect();
        let seq = Executor::Sequential.map(&items, |x| x * 3);
        let par = Executor::new(8).map(&items, |x| x * 3);
        assert_eq!(seq, par);
    }
}
