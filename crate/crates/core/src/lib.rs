//! Evolutionary attacks on the Anshel–Anshel–Goldfeld key exchange over
//! polycyclic groups `O ⋊ U` built from number fields, with a generate-and-test
//! search over chains of simple word heuristics.
//!
//! The crate is organised bottom-up:
//!
//! * [`pcgroup`] – exact arithmetic in `O ⋊ U`, free words and length functions;
//! * [`aag`] – instance generation, equation costs and verification;
//! * [`heuristics`] – the seven word heuristics and chains of them;
//! * [`ea`] – the evolutionary algorithm with an injectable chain slot;
//! * [`lba`] – single-heuristic hillclimbers;
//! * [`hyperheuristic`] – the chain generate-and-test loop;
//! * [`harness`] – seeding, parallel execution, experiments and file formats.

pub mod aag;
pub mod ea;
pub mod error;
pub mod harness;
pub mod heuristics;
pub mod hyperheuristic;
pub mod lba;
pub mod pcgroup;

pub use aag::{AagInstance, AagParams, CostVector};
pub use ea::{EaConfig, EaRunResult, OperatorCounts};
pub use error::{Error, Result};
pub use harness::parallel::Executor;
pub use harness::seed::RunSeed;
pub use heuristics::{HeuristicChain, HeuristicId};
pub use hyperheuristic::{HhConfig, HhRunReport, ObjectiveVector};
pub use lba::LbaConfig;
pub use pcgroup::{GroupElement, GroupSpec, Letter, Word};
