//! Single-solution memetic optimization.
//!
//! The optimizer keeps one elite solution and improves it with three
//! exploration operators of decreasing reach (see [`explorers`]),
//! coordinated by trial and error (see [`coordinator`]). The crate also
//! ships the benchmark suite used to evaluate it ([`benchmarks`]), rank-based
//! statistics for comparing optimizers ([`stats`]) and an IIR filter
//! identification problem ([`iir`]).
//!
//! ```
//! use some_core::{benchmarks, run, SomeConfig};
//!
//! let suite = benchmarks::make_suite(7);
//! let sphere = &suite[0];
//! let result = run(sphere, &SomeConfig::default(), 5_000, 1).unwrap();
//! assert!(result.best.fitness < 1e3);
//! ```

pub mod benchmarks;
pub mod coordinator;
pub mod domain;
pub mod error;
pub mod explorers;
pub mod iir;
pub mod problem;
pub mod rng;
pub mod search;
pub mod stats;

pub use coordinator::{run, run_batch, run_observed, Phase, PhaseEvent, PhaseUsage, RunResult, SomeConfig, Variant};
pub use domain::{toroidal_correct, uniform_sample, Domain};
pub use error::{Error, Result};
pub use problem::{evaluate, BudgetTracker, Candidate, Objective, Problem, WORST};
pub use rng::{derive_seed, RngStream};
pub use search::{SearchState, TrajectoryPoint};
