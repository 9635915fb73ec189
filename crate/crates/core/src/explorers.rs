//! The three exploration operators.
//!
//! * long distance: a uniform sample of the whole space that inherits a
//!   short contiguous block of the elite through exponential crossover;
//! * middle distance: the same move restricted to a hypercube around the
//!   elite, inheriting most of the elite's genes;
//! * short distance: deterministic per-coordinate descent with a shrinking
//!   radius.
//!
//! Every operator replaces the elite when the trial is no worse (`<=`), so
//! the elite fitness never increases. Success means the elite moved to a
//! different point, whether strictly better or tied. All operators stop with
//! [`Error::BudgetExhausted`] as soon as the budget is spent; the elite
//! passed in by reference holds the best point accepted so far.

use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::problem::Candidate;
use crate::rng::RngStream;
use crate::search::SearchState;

/// Crossover rate giving a one-half chance that `n * alpha` genes beyond the
/// first are inherited: `cr = 2^(-1 / (n * alpha))`.
pub fn crossover_rate(n: usize, alpha: f64) -> Result<f64> {
    let expected = n as f64 * alpha;
    if !(expected > 0.0 && expected.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "n * alpha must be positive, got {n} * {alpha}"
        )));
    }
    let cr = (-1.0 / expected).exp2();
    Ok(cr.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossoverParams {
    pub alpha: f64,
    pub cr: f64,
    pub n: usize,
}

impl CrossoverParams {
    pub fn new(n: usize, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "inheritance factor must lie in (0, 1), got {alpha}"
            )));
        }
        Ok(Self {
            alpha,
            cr: crossover_rate(n, alpha)?,
            n,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HypercubeParams {
    pub delta_fraction: f64,
    pub k: usize,
}

impl HypercubeParams {
    pub fn new(delta_fraction: f64, k: usize) -> Result<Self> {
        if !(delta_fraction > 0.0 && delta_fraction <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "hypercube width fraction must lie in (0, 1], got {delta_fraction}"
            )));
        }
        if k == 0 {
            return Err(Error::InvalidParameter("trials multiplier k must be positive".into()));
        }
        Ok(Self { delta_fraction, k })
    }

    pub fn trials_per_round(&self, n: usize) -> usize {
        self.k * n
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShortSearchParams {
    pub rho_fraction: f64,
    pub max_sweeps: usize,
}

impl ShortSearchParams {
    pub const DEFAULT_MAX_SWEEPS: usize = 150;

    pub fn new(rho_fraction: f64, max_sweeps: usize) -> Result<Self> {
        if !(rho_fraction > 0.0 && rho_fraction <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "initial radius fraction must lie in (0, 1], got {rho_fraction}"
            )));
        }
        if max_sweeps == 0 {
            return Err(Error::InvalidParameter("max_sweeps must be positive".into()));
        }
        Ok(Self {
            rho_fraction,
            max_sweeps,
        })
    }
}

/// DE-style exponential crossover. One gene at a uniformly random position
/// is copied from `elite` into `base`, then further genes at the following
/// positions (wrapping around) while successive uniform draws stay `<= cr`.
///
/// Returns the number of genes copied, between 1 and `n`.
pub fn exponential_crossover(elite: &[f64], base: &mut [f64], cr: f64, rng: &mut RngStream) -> usize {
    let n = elite.len();
    debug_assert_eq!(n, base.len());
    let mut i = rng.index(n);
    base[i] = elite[i];
    let mut copied = 1;
    // Draws in (0, 1]: cr = 0 never continues, cr = 1 always does.
    while copied < n && rng.uniform_open_closed() <= cr {
        i = (i + 1) % n;
        base[i] = elite[i];
        copied += 1;
    }
    copied
}

/// One long distance move. Returns whether the elite was replaced.
pub fn long_distance_step(
    elite: &mut Candidate,
    params: &CrossoverParams,
    state: &mut SearchState<'_>,
) -> Result<bool> {
    let domain = state.problem().domain();
    let mut trial = domain.sample(&mut state.rng);
    exponential_crossover(&elite.genes, &mut trial, params.cr, &mut state.rng);
    let fitness = state.evaluate(&trial)?;
    Ok(state.accept(elite, &trial, fitness))
}

/// Rounds of `k * n` trials drawn inside a hypercube centred on the elite.
/// A round that replaces the elite at least once re-centres the hypercube
/// and triggers another round; the phase ends after the first round
/// without a replacement. Returns whether any round succeeded.
pub fn middle_distance_phase(
    elite: &mut Candidate,
    hypercube: &HypercubeParams,
    crossover: &CrossoverParams,
    state: &mut SearchState<'_>,
) -> Result<bool> {
    let domain = state.problem().domain();
    let n = domain.dim();
    let half_side: Vec<f64> = domain.scaled_widths(0.5 * hypercube.delta_fraction);
    let trials = hypercube.trials_per_round(n);
    let mut center = elite.genes.clone();
    let mut trial = vec![0.0; n];
    let mut improved = false;

    loop {
        center.copy_from_slice(&elite.genes);
        let mut replaced = false;
        for _ in 0..trials {
            sample_around(&center, &half_side, domain, &mut state.rng, &mut trial);
            exponential_crossover(&elite.genes, &mut trial, crossover.cr, &mut state.rng);
            let fitness = state.evaluate(&trial)?;
            replaced |= state.accept(elite, &trial, fitness);
        }
        if !replaced {
            return Ok(improved);
        }
        improved = true;
    }
}

fn sample_around(center: &[f64], half_side: &[f64], domain: &Domain, rng: &mut RngStream, out: &mut [f64]) {
    for (i, v) in out.iter_mut().enumerate() {
        let h = half_side[i];
        *v = domain.wrap_at(i, rng.uniform_in(center[i] - h, center[i] + h));
    }
}

/// Deterministic coordinate descent.
///
/// Each sweep probes every coordinate at `-rho` and, if that fails, at
/// `+rho/2`, keeping each probe that is no worse than the best point of the
/// sweep. Probes that round back onto the current point (radius below one
/// ulp) are not kept. A sweep that kept at least one probe moves the elite; a sweep
/// that kept none halves every radius. The radius starts from
/// `rho_fraction` of each dimension's width on every call.
///
/// Returns whether the elite was replaced at least once.
pub fn short_distance_phase(
    elite: &mut Candidate,
    params: &ShortSearchParams,
    state: &mut SearchState<'_>,
) -> Result<bool> {
    let domain = state.problem().domain();
    let n = domain.dim();
    let entry_fitness = elite.fitness;
    let mut rho = domain.scaled_widths(params.rho_fraction);
    let mut trial = elite.clone();
    let mut probe = elite.genes.clone();
    let mut accepted_any = false;

    for _ in 0..params.max_sweeps {
        trial.clone_from(elite);
        probe.copy_from_slice(&elite.genes);
        let mut kept = false;

        for i in 0..n {
            let base = elite.genes[i];
            probe[i] = domain.wrap_at(i, base - rho[i]);
            let f = match state.evaluate(&probe) {
                Ok(f) => f,
                Err(e) => return Err(commit_partial(elite, &trial, kept, state, e)),
            };
            if f <= trial.fitness && probe[i] != trial.genes[i] {
                trial.genes.copy_from_slice(&probe);
                trial.fitness = f;
                kept = true;
                continue;
            }
            probe[i] = domain.wrap_at(i, base + 0.5 * rho[i]);
            let f = match state.evaluate(&probe) {
                Ok(f) => f,
                Err(e) => return Err(commit_partial(elite, &trial, kept, state, e)),
            };
            if f <= trial.fitness && probe[i] != trial.genes[i] {
                trial.genes.copy_from_slice(&probe);
                trial.fitness = f;
                kept = true;
            } else {
                probe[i] = base;
            }
        }

        if kept {
            state.accept(elite, &trial.genes, trial.fitness);
            accepted_any = true;
        } else {
            rho.iter_mut().for_each(|r| *r *= 0.5);
        }
    }

    Ok(accepted_any || elite.fitness < entry_fitness)
}

// A sweep cut short by the budget still hands over the best point it kept;
// no further evaluation is needed since its fitness is already known.
fn commit_partial(
    elite: &mut Candidate,
    trial: &Candidate,
    kept: bool,
    state: &mut SearchState<'_>,
    err: Error,
) -> Error {
    if kept {
        state.accept(elite, &trial.genes, trial.fitness);
    }
    err
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Domain;
    use crate::problem::Problem;

    fn sphere_problem(n: usize, lo: f64, hi: f64) -> Problem {
        Problem::new(
            "sphere",
            Domain::hypercube(n, lo, hi).unwrap(),
            |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>(),
        )
    }

    #[test]
    fn crossover_rate_reference_values() {
        // 2^(-1/1.5), 2^(-1/5), 2^(-1/28.5)
        let cases = [(30, 0.05, 0.629_960_524_947_436_6), (100, 0.05, 0.870_550_563_296_124_1), (30, 0.95, 0.975_972_417_522_180_2)];
        for (n, alpha, want) in cases {
            let cr = crossover_rate(n, alpha).unwrap();
            assert!((cr - want).abs() < 1e-12, "n={n} alpha={alpha}: {cr}");
            assert!((cr.powf(n as f64 * alpha) - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn crossover_rate_rejects_nonpositive() {
        assert!(crossover_rate(30, 0.0).is_err());
        assert!(crossover_rate(0, 0.05).is_err());
        assert!(crossover_rate(10, -1.0).is_err());
    }

    #[test]
    fn zero_rate_copies_one_gene() {
        let mut rng = RngStream::new(3);
        let elite = vec![1.0; 10];
        for _ in 0..1000 {
            let mut base = vec![0.0; 10];
            assert_eq!(exponential_crossover(&elite, &mut base, 0.0, &mut rng), 1);
            assert_eq!(base.iter().filter(|&&v| v == 1.0).count(), 1);
        }
    }

    #[test]
    fn unit_rate_copies_everything() {
        let mut rng = RngStream::new(4);
        let elite: Vec<f64> = (0..8).map(f64::from).collect();
        let mut base = vec![-1.0; 8];
        assert_eq!(exponential_crossover(&elite, &mut base, 1.0, &mut rng), 8);
        assert_eq!(base, elite);
    }

    #[test]
    fn copied_block_is_contiguous_modulo_n() {
        let mut rng = RngStream::new(5);
        let n = 12;
        let elite = vec![1.0; n];
        for _ in 0..2000 {
            let mut base = vec![0.0; n];
            let copied = exponential_crossover(&elite, &mut base, 0.8, &mut rng);
            let ones: Vec<usize> = (0..n).filter(|&i| base[i] == 1.0).collect();
            assert_eq!(ones.len(), copied);
            // Exactly one 0 -> 1 transition around the ring unless all copied.
            let transitions = (0..n).filter(|&i| base[i] == 0.0 && base[(i + 1) % n] == 1.0).count();
            assert_eq!(transitions, usize::from(copied < n));
        }
    }

    #[test]
    fn long_step_accepts_ties_on_plateau() {
        let p = Problem::new("flat", Domain::hypercube(5, -1.0, 1.0).unwrap(), |_: &[f64]| 3.0);
        let mut state = SearchState::new(&p, 100, 9).unwrap();
        let mut elite = state.initial_elite().unwrap();
        let cp = CrossoverParams::new(5, 0.05).unwrap();
        for _ in 0..50 {
            let before = elite.genes.clone();
            assert!(long_distance_step(&mut elite, &cp, &mut state).unwrap());
            assert_ne!(before, elite.genes);
        }
    }

    #[test]
    fn long_step_keeps_optimal_elite() {
        let p = sphere_problem(4, -5.0, 5.0);
        let mut state = SearchState::new(&p, 1000, 1).unwrap();
        let mut elite = Candidate::new(vec![0.0; 4], 0.0);
        state.adopt(&elite);
        let cp = CrossoverParams::new(4, 0.05).unwrap();
        for _ in 0..200 {
            assert!(!long_distance_step(&mut elite, &cp, &mut state).unwrap());
        }
        assert_eq!(elite.genes, vec![0.0; 4]);
        assert_eq!(state.consumed(), 200);
    }

    #[test]
    fn long_steps_descend_on_sphere() {
        let p = sphere_problem(10, -100.0, 100.0);
        let mut state = SearchState::new(&p, 20_000, 77).unwrap();
        let mut elite = Candidate::new(vec![10.0; 10], 1000.0);
        state.adopt(&elite);
        let cp = CrossoverParams::new(10, 0.05).unwrap();
        let mut last = elite.fitness;
        for _ in 0..10_000 {
            long_distance_step(&mut elite, &cp, &mut state).unwrap();
            assert!(elite.fitness <= last);
            last = elite.fitness;
        }
        assert!(elite.fitness < 1000.0);
    }

    #[test]
    fn middle_round_at_optimum_costs_k_n() {
        let n = 30;
        let p = Problem::new(
            "shifted-sphere",
            Domain::hypercube(n, -100.0, 100.0).unwrap(),
            |x: &[f64]| x.iter().map(|v| (v - 1.0) * (v - 1.0)).sum::<f64>(),
        );
        let mut state = SearchState::new(&p, 100_000, 11).unwrap();
        let mut elite = Candidate::new(vec![1.0; n], 0.0);
        state.adopt(&elite);
        let hp = HypercubeParams::new(0.2, 4).unwrap();
        let cp = CrossoverParams::new(n, 0.95).unwrap();
        let improved = middle_distance_phase(&mut elite, &hp, &cp, &mut state).unwrap();
        assert!(!improved);
        assert_eq!(state.consumed(), 120);
        assert_eq!(elite.genes, vec![1.0; n]);
    }

    #[test]
    fn middle_rounds_drift_toward_minimum() {
        // In one dimension the crossover always inherits the elite gene.
        let p = Problem::new("abs", Domain::hypercube(3, 0.0, 1.0).unwrap(), |x: &[f64]| {
            x.iter().map(|v| (v - 0.5).abs()).sum()
        });
        let mut state = SearchState::new(&p, 20_000, 8).unwrap();
        let mut elite = Candidate::new(vec![0.9; 3], 1.2);
        state.adopt(&elite);
        let hp = HypercubeParams::new(0.2, 4).unwrap();
        let cp = CrossoverParams::new(3, 0.95).unwrap();
        for _ in 0..50 {
            if middle_distance_phase(&mut elite, &hp, &cp, &mut state).is_err() {
                break;
            }
        }
        assert!(elite.fitness < 0.3, "{}", elite.fitness);
    }

    #[test]
    fn middle_samples_stay_in_domain() {
        let domain = Domain::new(vec![0.0, -1.0], vec![1.0, 1.0]).unwrap();
        let p = Problem::new("box", domain.clone(), move |x: &[f64]| {
            assert!(domain.contains(x), "{x:?}");
            x[0] + x[1]
        });
        let mut state = SearchState::new(&p, 5_000, 3).unwrap();
        let mut elite = Candidate::new(vec![0.99, -0.99], 0.0);
        state.adopt(&elite);
        let hp = HypercubeParams::new(0.5, 4).unwrap();
        let cp = CrossoverParams::new(2, 0.95).unwrap();
        while middle_distance_phase(&mut elite, &hp, &cp, &mut state).is_ok() {}
        assert_eq!(state.consumed(), 5_000);
    }

    #[test]
    fn short_phase_hand_trace() {
        let p = Problem::new("x2", Domain::hypercube(1, -10.0, 10.0).unwrap(), |x: &[f64]| x[0] * x[0]);
        let mut state = SearchState::new(&p, 3, 0).unwrap();
        let mut elite = Candidate::new(vec![5.0], 25.0);
        state.adopt(&elite);
        // rho = 0.2 * 20 = 4. Sweep 1: probe 1 (f=1) kept -> elite 1.
        // Sweep 2: probe -3 (f=9) and 3 (f=9) fail -> rho 2. Budget ends.
        let sp = ShortSearchParams::new(0.2, 2).unwrap();
        let improved = short_distance_phase(&mut elite, &sp, &mut state).unwrap();
        assert!(improved);
        assert_eq!(elite.genes, vec![1.0]);
        assert_eq!(state.consumed(), 3);
    }

    #[test]
    fn short_phase_at_minimum_never_moves() {
        let p = sphere_problem(3, -1.0, 1.0);
        let mut state = SearchState::new(&p, 10_000, 0).unwrap();
        let mut elite = Candidate::new(vec![0.0; 3], 0.0);
        state.adopt(&elite);
        let sp = ShortSearchParams::new(0.4, 20).unwrap();
        assert!(!short_distance_phase(&mut elite, &sp, &mut state).unwrap());
        assert_eq!(elite.genes, vec![0.0; 3]);
        // Every probe fails, so each sweep costs exactly 2n.
        assert_eq!(state.consumed(), 20 * 6);
    }

    #[test]
    fn short_sweep_cost_between_n_and_2n() {
        let n = 6;
        let p = Problem::new(
            "rosen",
            Domain::hypercube(n, -5.0, 5.0).unwrap(),
            |x: &[f64]| {
                x.windows(2)
                    .map(|w| 100.0 * (w[1] - w[0] * w[0]).powi(2) + (1.0 - w[0]).powi(2))
                    .sum::<f64>()
            },
        );
        let mut state = SearchState::new(&p, 1_000_000, 0).unwrap();
        let mut elite = Candidate::new(vec![-2.0; n], p.value(&[-2.0; 6]));
        state.adopt(&elite);
        for _ in 0..40 {
            let before = state.consumed();
            let sp = ShortSearchParams::new(0.4, 1).unwrap();
            short_distance_phase(&mut elite, &sp, &mut state).unwrap();
            let cost = state.consumed() - before;
            assert!((n as u64..=2 * n as u64).contains(&cost), "{cost}");
        }
    }

    #[test]
    fn short_phase_commits_partial_sweep_on_exhaustion() {
        let p = sphere_problem(3, -10.0, 10.0);
        let mut state = SearchState::new(&p, 1, 0).unwrap();
        let mut elite = Candidate::new(vec![5.0, 5.0, 5.0], 75.0);
        state.adopt(&elite);
        let sp = ShortSearchParams::new(0.2, 150).unwrap();
        let err = short_distance_phase(&mut elite, &sp, &mut state).unwrap_err();
        assert!(err.is_budget_exhausted());
        assert_eq!(elite.genes, vec![1.0, 5.0, 5.0]);
        assert_eq!(elite.fitness, 51.0);
    }

    #[test]
    fn parameter_validation() {
        assert!(HypercubeParams::new(0.0, 4).is_err());
        assert!(HypercubeParams::new(0.2, 0).is_err());
        assert!(ShortSearchParams::new(1.5, 10).is_err());
        assert!(ShortSearchParams::new(0.4, 0).is_err());
        assert!(CrossoverParams::new(10, 1.0).is_err());
    }
}
