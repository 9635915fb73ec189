use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::domain::Domain;
use crate::error::{Error, Result};

/// Fitness assigned to infeasible or invalid points. It orders above every
/// finite fitness and compares equal to itself, so the `<=` replacement rule
/// still treats two rejected points as a tie.
pub const WORST: f64 = f64::MAX;

/// Maps non-finite objective values onto [`WORST`].
#[inline]
pub fn sanitize_fitness(f: f64) -> f64 {
    if f.is_finite() {
        f
    } else {
        WORST
    }
}

/// A decision vector with its cached fitness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub genes: Vec<f64>,
    pub fitness: f64,
}

impl Candidate {
    pub fn new(genes: Vec<f64>, fitness: f64) -> Self {
        Self { genes, fitness }
    }

    pub fn dim(&self) -> usize {
        self.genes.len()
    }
}

/// A black-box objective to be minimized.
pub trait Objective: Send + Sync {
    fn value(&self, x: &[f64]) -> f64;
}

impl<F> Objective for F
where
    F: Fn(&[f64]) -> f64 + Send + Sync,
{
    fn value(&self, x: &[f64]) -> f64 {
        self(x)
    }
}

/// An objective bound to its decision space.
#[derive(Clone)]
pub struct Problem {
    label: String,
    domain: Domain,
    objective: Arc<dyn Objective>,
    known_optimum: Option<f64>,
}

impl Problem {
    pub fn new(label: impl Into<String>, domain: Domain, objective: impl Objective + 'static) -> Self {
        Self::from_shared(label, domain, Arc::new(objective))
    }

    pub fn from_shared(label: impl Into<String>, domain: Domain, objective: Arc<dyn Objective>) -> Self {
        Self {
            label: label.into(),
            domain,
            objective,
            known_optimum: None,
        }
    }

    pub fn with_known_optimum(mut self, value: f64) -> Self {
        self.known_optimum = Some(value);
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn known_optimum(&self) -> Option<f64> {
        self.known_optimum
    }

    /// Objective value without budget accounting, for reporting and tests.
    pub fn value(&self, x: &[f64]) -> f64 {
        sanitize_fitness(self.objective.value(x))
    }
}

impl fmt::Debug for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Problem")
            .field("label", &self.label)
            .field("dim", &self.dim())
            .field("known_optimum", &self.known_optimum)
            .finish_non_exhaustive()
    }
}

/// Counts fitness evaluations against a hard limit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BudgetTracker {
    consumed: u64,
    limit: u64,
}

impl BudgetTracker {
    pub fn new(limit: u64) -> Result<Self> {
        if limit == 0 {
            return Err(Error::InvalidParameter("budget limit must be positive".into()));
        }
        Ok(Self { consumed: 0, limit })
    }

    pub fn consumed(&self) -> u64 {
        self.consumed
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn remaining(&self) -> u64 {
        self.limit - self.consumed
    }

    pub fn is_exhausted(&self) -> bool {
        self.consumed >= self.limit
    }

    /// Takes one evaluation from the budget.
    pub fn charge(&mut self) -> Result<()> {
        if self.is_exhausted() {
            return Err(Error::BudgetExhausted { limit: self.limit });
        }
        self.consumed += 1;
        Ok(())
    }
}

/// Evaluates `x`, charging exactly one unit of `tracker`. Fails without
/// calling the objective once the budget is spent.
pub fn evaluate(problem: &Problem, x: &[f64], tracker: &mut BudgetTracker) -> Result<f64> {
    tracker.charge()?;
    Ok(problem.value(x))
}
