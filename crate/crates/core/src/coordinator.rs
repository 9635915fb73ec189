//! Trial-and-error coordination of the exploration operators.
//!
//! The full algorithm (3SOME) runs long distance moves until one replaces the
//! elite, then middle distance rounds until one fails, then a short distance
//! phase. A successful short phase sends the search back to the middle
//! distance stage, a failed one back to long distance. The ablation variants
//! keep the same loop with one or two operators removed.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::explorers::{
    long_distance_step, middle_distance_phase, short_distance_phase, CrossoverParams, HypercubeParams,
    ShortSearchParams,
};
use crate::problem::{Candidate, Problem};
use crate::rng::derive_seed;
use crate::search::{SearchState, TrajectoryPoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Variant {
    /// Long, middle and short distance exploration.
    #[serde(rename = "3SOME")]
    ThreeSome,
    /// Long distance exploration only.
    #[serde(rename = "1SOME")]
    OneSome,
    #[serde(rename = "2SOME_LM")]
    TwoSomeLm,
    #[serde(rename = "2SOME_LS")]
    TwoSomeLs,
    #[serde(rename = "2SOME_MS")]
    TwoSomeMs,
}

impl Variant {
    pub const ALL: [Variant; 5] = [
        Variant::ThreeSome,
        Variant::OneSome,
        Variant::TwoSomeLm,
        Variant::TwoSomeLs,
        Variant::TwoSomeMs,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Variant::ThreeSome => "3SOME",
            Variant::OneSome => "1SOME",
            Variant::TwoSomeLm => "2SOME_LM",
            Variant::TwoSomeLs => "2SOME_LS",
            Variant::TwoSomeMs => "2SOME_MS",
        }
    }

    pub fn uses(self, phase: Phase) -> bool {
        use Phase::*;
        match self {
            Variant::ThreeSome => true,
            Variant::OneSome => phase == Long,
            Variant::TwoSomeLm => phase != Short,
            Variant::TwoSomeLs => phase != Middle,
            Variant::TwoSomeMs => phase != Long,
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| !matches!(c, '(' | ')' | '+' | '_' | '-' | ' '))
            .collect::<String>()
            .to_ascii_uppercase();
        match key.as_str() {
            "3SOME" => Ok(Variant::ThreeSome),
            "1SOME" => Ok(Variant::OneSome),
            "2SOMELM" => Ok(Variant::TwoSomeLm),
            "2SOMELS" => Ok(Variant::TwoSomeLs),
            "2SOMEMS" => Ok(Variant::TwoSomeMs),
            _ => Err(Error::InvalidParameter(format!("unknown algorithm id '{s}'"))),
        }
    }
}

/// Algorithm parameters. The defaults are the published settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SomeConfig {
    /// Inheritance factor of the long distance crossover.
    pub alpha: f64,
    /// Hypercube side as a fraction of each dimension's width.
    pub delta_fraction: f64,
    /// Middle distance trials per round, per dimension.
    pub k: usize,
    /// Initial short distance radius as a fraction of each dimension's width.
    pub rho_fraction: f64,
    pub max_sweeps: usize,
    pub variant: Variant,
}

impl Default for SomeConfig {
    fn default() -> Self {
        Self {
            alpha: 0.05,
            delta_fraction: 0.20,
            k: 4,
            rho_fraction: 0.40,
            max_sweeps: ShortSearchParams::DEFAULT_MAX_SWEEPS,
            variant: Variant::ThreeSome,
        }
    }
}

impl SomeConfig {
    pub fn with_variant(variant: Variant) -> Self {
        Self {
            variant,
            ..Self::default()
        }
    }

    fn operators(&self, n: usize) -> Result<Operators> {
        Ok(Operators {
            long: CrossoverParams::new(n, self.alpha)?,
            middle: CrossoverParams::new(n, 1.0 - self.alpha)?,
            hypercube: HypercubeParams::new(self.delta_fraction, self.k)?,
            short: ShortSearchParams::new(self.rho_fraction, self.max_sweeps)?,
        })
    }
}

struct Operators {
    long: CrossoverParams,
    middle: CrossoverParams,
    hypercube: HypercubeParams,
    short: ShortSearchParams,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Phase {
    Long,
    Middle,
    Short,
}

/// One operator activation: a single long distance move, a whole middle
/// distance phase or a whole short distance phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseEvent {
    pub phase: Phase,
    pub evaluations_before: u64,
    pub evaluations_after: u64,
    pub improved: bool,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseCounters {
    pub activations: u64,
    pub successes: u64,
    pub evaluations: u64,
}

/// Evaluation accounting per operator. The initial sample is the only
/// evaluation not attributed to an operator.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseUsage {
    pub long: PhaseCounters,
    pub middle: PhaseCounters,
    pub short: PhaseCounters,
}

impl PhaseUsage {
    pub fn get(&self, phase: Phase) -> &PhaseCounters {
        match phase {
            Phase::Long => &self.long,
            Phase::Middle => &self.middle,
            Phase::Short => &self.short,
        }
    }

    fn record(&mut self, event: &PhaseEvent) {
        let c = match event.phase {
            Phase::Long => &mut self.long,
            Phase::Middle => &mut self.middle,
            Phase::Short => &mut self.short,
        };
        c.activations += 1;
        c.successes += u64::from(event.improved);
        c.evaluations += event.evaluations_after - event.evaluations_before;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub best: Candidate,
    /// Best-so-far fitness, non-increasing, ending at `best.fitness`.
    pub trajectory: Vec<TrajectoryPoint>,
    pub evaluations_used: u64,
    pub seed: u64,
    pub usage: PhaseUsage,
}

impl RunResult {
    /// Best-so-far fitness after `evaluations` evaluations, or `None` before
    /// the first recorded point.
    pub fn fitness_at(&self, evaluations: u64) -> Option<f64> {
        let idx = self.trajectory.partition_point(|p| p.evaluations <= evaluations);
        idx.checked_sub(1).map(|i| self.trajectory[i].fitness)
    }
}

pub fn run(problem: &Problem, config: &SomeConfig, budget_limit: u64, seed: u64) -> Result<RunResult> {
    run_observed(problem, config, budget_limit, seed, &mut |_| {})
}

/// [`run`] with a callback invoked after every operator activation.
pub fn run_observed(
    problem: &Problem,
    config: &SomeConfig,
    budget_limit: u64,
    seed: u64,
    observer: &mut dyn FnMut(&PhaseEvent),
) -> Result<RunResult> {
    if budget_limit == 0 {
        return Err(Error::InvalidParameter("budget limit must be positive".into()));
    }
    let ops = config.operators(problem.dim())?;
    let mut state = SearchState::new(problem, budget_limit, seed)?;
    let mut usage = PhaseUsage::default();
    let mut elite = state.initial_elite()?;

    let mut driver = Driver {
        ops: &ops,
        state: &mut state,
        usage: &mut usage,
        observer,
    };
    let outcome = driver.coordinate(config.variant, &mut elite);
    match outcome {
        Err(e) if e.is_budget_exhausted() => {}
        Err(e) => return Err(e),
        Ok(never) => match never {},
    }

    let (tracker, trajectory) = state.finish(&elite);
    Ok(RunResult {
        best: elite,
        trajectory,
        evaluations_used: tracker.consumed(),
        seed,
        usage,
    })
}

enum Never {}

struct Driver<'s, 'p> {
    ops: &'s Operators,
    state: &'s mut SearchState<'p>,
    usage: &'s mut PhaseUsage,
    observer: &'s mut dyn FnMut(&PhaseEvent),
}

impl Driver<'_, '_> {
    /// Loops until the budget runs out, which surfaces as the error.
    fn coordinate(&mut self, variant: Variant, elite: &mut Candidate) -> Result<Never> {
        match variant {
            Variant::ThreeSome => loop {
                self.long_until_success(elite)?;
                loop {
                    self.middle(elite)?;
                    if !self.short(elite)? {
                        break;
                    }
                }
            },
            Variant::OneSome => loop {
                self.long(elite)?;
            },
            Variant::TwoSomeLm => loop {
                self.long_until_success(elite)?;
                self.middle(elite)?;
            },
            // Without a middle stage the success branch has nowhere to go,
            // so both outcomes of the short phase return to long distance.
            Variant::TwoSomeLs => loop {
                self.long_until_success(elite)?;
                self.short(elite)?;
            },
            // Without a long stage a failed short phase falls through to
            // middle distance again.
            Variant::TwoSomeMs => loop {
                self.middle(elite)?;
                self.short(elite)?;
            },
        }
    }

    fn long_until_success(&mut self, elite: &mut Candidate) -> Result<()> {
        while !self.long(elite)? {}
        Ok(())
    }

    fn long(&mut self, elite: &mut Candidate) -> Result<bool> {
        let params = self.ops.long;
        self.activate(Phase::Long, elite, |e, s| long_distance_step(e, &params, s))
    }

    fn middle(&mut self, elite: &mut Candidate) -> Result<bool> {
        let (hp, cp) = (self.ops.hypercube, self.ops.middle);
        self.activate(Phase::Middle, elite, |e, s| middle_distance_phase(e, &hp, &cp, s))
    }

    fn short(&mut self, elite: &mut Candidate) -> Result<bool> {
        let sp = self.ops.short;
        self.activate(Phase::Short, elite, |e, s| short_distance_phase(e, &sp, s))
    }

    fn activate(
        &mut self,
        phase: Phase,
        elite: &mut Candidate,
        op: impl FnOnce(&mut Candidate, &mut SearchState<'_>) -> Result<bool>,
    ) -> Result<bool> {
        let before = self.state.consumed();
        let entry_fitness = elite.fitness;
        let outcome = op(elite, self.state);
        let improved = match &outcome {
            Ok(b) => *b,
            Err(_) => elite.fitness < entry_fitness,
        };
        if outcome.is_err() && self.state.consumed() == before {
            return outcome;
        }
        let event = PhaseEvent {
            phase,
            evaluations_before: before,
            evaluations_after: self.state.consumed(),
            improved,
        };
        self.usage.record(&event);
        (self.observer)(&event);
        outcome
    }
}

/// `n_runs` independent runs. Run `i` uses
/// `derive_seed(master_seed, problem.label(), variant.label(), i)`; runs may
/// execute in parallel but results are returned in run order.
pub fn run_batch(
    problem: &Problem,
    config: &SomeConfig,
    budget_limit: u64,
    n_runs: usize,
    master_seed: u64,
) -> Result<Vec<RunResult>> {
    if n_runs == 0 {
        return Err(Error::InvalidParameter("n_runs must be at least 1".into()));
    }
    (0..n_runs as u64)
        .into_par_iter()
        .map(|i| {
            let seed = derive_seed(master_seed, problem.label(), config.variant.label(), i);
            run(problem, config, budget_limit, seed)
        })
        .collect()
}
