//! Executes the (problem, algorithm) batches of an experiment.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use some_core::iir::{self, SignalPair};
use some_core::{benchmarks, run_batch, Problem, RunResult, SomeConfig, Variant};

use crate::config::{ExperimentConfig, ProblemRef};
use crate::CliError;

/// All runs of one algorithm on one problem, as stored on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchRecord {
    pub problem: String,
    pub dimension: usize,
    pub algorithm: Variant,
    pub budget: u64,
    pub master_seed: u64,
    /// Seed of the frozen input noise; IIR only.
    pub noise_seed: Option<u64>,
    pub runs: Vec<RunResult>,
}

impl BatchRecord {
    pub fn final_fitness(&self) -> Vec<f64> {
        self.runs.iter().map(|r| r.best.fitness).collect()
    }

    pub fn best_run(&self) -> Option<&RunResult> {
        self.runs.iter().min_by(|a, b| a.best.fitness.total_cmp(&b.best.fitness))
    }

    /// Position in report order: benchmarks by id, then IIR; algorithms in
    /// [`Variant::ALL`] order.
    pub fn sort_key(&self) -> (u32, usize) {
        let problem = match self.problem.strip_prefix('f').and_then(|d| d.parse::<u32>().ok()) {
            Some(id) => id,
            None => u32::MAX,
        };
        let algo = Variant::ALL.iter().position(|v| *v == self.algorithm).unwrap_or(usize::MAX);
        (problem, algo)
    }
}

fn build_problem(p: ProblemRef, config: &ExperimentConfig, signals: &mut Option<Arc<SignalPair>>) -> Result<Problem, CliError> {
    match p {
        ProblemRef::Benchmark(id) => {
            benchmarks::make_problem(id, config.seed).map_err(|e| CliError::Config(e.to_string()))
        }
        ProblemRef::Iir => {
            let s = signals.get_or_insert_with(|| Arc::new(SignalPair::new(config.noise_seed)));
            Ok(iir::make_iir_problem_with(s.clone(), Default::default()))
        }
    }
}

/// Runs every batch of `config`, calling `progress` after each one. The
/// records come back in report order.
pub fn run_experiment(
    config: &ExperimentConfig,
    progress: &mut dyn FnMut(&BatchRecord),
) -> Result<Vec<BatchRecord>, CliError> {
    let mut signals = None;
    let mut records = Vec::new();
    for &p in &config.suite {
        let problem = build_problem(p, config, &mut signals)?;
        let budget = config.budget_for(p, problem.dim());
        for &algorithm in &config.algorithms {
            let runs = run_batch(&problem, &SomeConfig::with_variant(algorithm), budget, config.runs, config.seed)
                .map_err(|e| CliError::Runtime(format!("{} {algorithm}: {e}", problem.label())))?;
            let record = BatchRecord {
                problem: problem.label().to_string(),
                dimension: problem.dim(),
                algorithm,
                budget,
                master_seed: config.seed,
                noise_seed: (p == ProblemRef::Iir).then_some(config.noise_seed),
                runs,
            };
            progress(&record);
            records.push(record);
        }
    }
    records.sort_by_key(BatchRecord::sort_key);
    Ok(records)
}
