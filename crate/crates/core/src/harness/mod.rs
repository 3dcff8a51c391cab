//! Experiment plumbing: seeding, parallel execution, configuration, batch
//! runners and the CSV/JSON outputs they produce.

pub mod audit;
pub mod config;
pub mod csvout;
pub mod experiments;
pub mod parallel;
pub mod seed;

pub use config::{ExperimentConfig, GroupSource};
pub use parallel::{parallel_map, Executor};
pub use seed::RunSeed;
