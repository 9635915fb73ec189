//! Per-run search state shared by the exploration operators.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::problem::{evaluate, BudgetTracker, Candidate, Problem};
use crate::rng::RngStream;

/// Number of evenly spaced checkpoints recorded per run.
pub const CHECKPOINTS_PER_RUN: u64 = 200;

/// Best-so-far fitness after a given number of evaluations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub evaluations: u64,
    pub fitness: f64,
}

/// Everything a single run owns: the problem reference, its budget, its
/// random stream and the best-so-far trajectory.
///
/// The trajectory gets a point whenever the elite strictly improves and at
/// every `limit / 200` evaluations.
#[derive(Debug)]
pub struct SearchState<'a> {
    problem: &'a Problem,
    tracker: BudgetTracker,
    pub rng: RngStream,
    checkpoint_every: u64,
    elite_fitness: f64,
    trajectory: Vec<TrajectoryPoint>,
}

impl<'a> SearchState<'a> {
    pub fn new(problem: &'a Problem, budget_limit: u64, seed: u64) -> Result<Self> {
        let tracker = BudgetTracker::new(budget_limit)?;
        Ok(Self {
            problem,
            checkpoint_every: (budget_limit / CHECKPOINTS_PER_RUN).max(1),
            tracker,
            rng: RngStream::new(seed),
            elite_fitness: f64::INFINITY,
            trajectory: Vec::new(),
        })
    }

    pub fn problem(&self) -> &'a Problem {
        self.problem
    }

    pub fn tracker(&self) -> &BudgetTracker {
        &self.tracker
    }

    pub fn consumed(&self) -> u64 {
        self.tracker.consumed()
    }

    pub fn trajectory(&self) -> &[TrajectoryPoint] {
        &self.trajectory
    }

    /// Samples and evaluates the starting elite.
    pub fn initial_elite(&mut self) -> Result<Candidate> {
        let genes = self.problem.domain().sample(&mut self.rng);
        let fitness = self.evaluate(&genes)?;
        let elite = Candidate::new(genes, fitness);
        self.adopt(&elite);
        Ok(elite)
    }

    /// Makes `elite` the reference for trajectory recording, e.g. when an
    /// operator is driven directly with a hand-built starting point.
    pub fn adopt(&mut self, elite: &Candidate) {
        self.elite_fitness = elite.fitness;
        self.push_point(elite.fitness);
    }

    /// Charged objective call.
    pub fn evaluate(&mut self, x: &[f64]) -> Result<f64> {
        let f = evaluate(self.problem, x, &mut self.tracker)?;
        if self.tracker.consumed() % self.checkpoint_every == 0 && self.elite_fitness.is_finite() {
            self.push_point(self.elite_fitness);
        }
        Ok(f)
    }

    /// Replaces `elite` with the trial when the trial is no worse. Returns
    /// whether the elite moved: a trial identical to the elite (e.g. a
    /// crossover that inherited every gene) is not a replacement.
    pub fn accept(&mut self, elite: &mut Candidate, genes: &[f64], fitness: f64) -> bool {
        if fitness <= elite.fitness {
            if genes == elite.genes.as_slice() {
                return false;
            }
            elite.genes.copy_from_slice(genes);
            elite.fitness = fitness;
            if fitness < self.elite_fitness {
                self.elite_fitness = fitness;
                self.push_point(fitness);
            }
            true
        } else {
            false
        }
    }

    /// Closes the trajectory with the final elite and hands it over.
    pub fn finish(mut self, elite: &Candidate) -> (BudgetTracker, Vec<TrajectoryPoint>) {
        let used = self.tracker.consumed();
        match self.trajectory.last() {
            Some(p) if p.evaluations == used && p.fitness == elite.fitness => {}
            _ => self.trajectory.push(TrajectoryPoint {
                evaluations: used,
                fitness: elite.fitness,
            }),
        }
        (self.tracker, self.trajectory)
    }

    fn push_point(&mut self, fitness: f64) {
        let evaluations = self.tracker.consumed();
        if let Some(last) = self.trajectory.last_mut() {
            if last.evaluations == evaluations {
                last.fitness = last.fitness.min(fitness);
                return;
            }
        }
        self.trajectory.push(TrajectoryPoint { evaluations, fitness });
    }
}
