//! Scenario runner: declarative configs, the profile/barrier/field/audit
//! pipeline, report bundles and merging.

pub mod builtin;
pub mod config;
pub mod merge;
pub mod pipeline;
pub mod plot;
pub mod report;

use rayon::prelude::*;

use crate::config::Scenario;
use crate::pipeline::Outcome;

/// Environment variable capping the number of worker threads.
pub const WORKERS_ENV: &str = "BARRIER_BOUND_WORKERS";

/// Worker count from `BARRIER_BOUND_WORKERS`, if set to a positive integer.
pub fn worker_budget() -> Option<usize> {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|n| *n > 0)
}

/// Run scenarios in parallel on a pool sized by the worker budget. Results
/// come back in input order.
pub fn run_batch(scenarios: &[Scenario], workers: Option<usize>) -> Vec<Outcome> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = workers {
        builder = builder.num_threads(n);
    }
    match builder.build() {
        Ok(pool) => pool.install(|| scenarios.par_iter().map(pipeline::run_scenario).collect()),
        Err(e) => {
            log::warn!("thread pool: {e}; running on the global pool");
            scenarios.par_iter().map(pipeline::run_scenario).collect()
        }
    }
}
