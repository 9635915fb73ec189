//! IIR filter identification.
//!
//! A tenth-order IIR filter is tuned so that its response to a fixed input
//! matches the output of a known plant. Candidates are the 21 filter
//! coefficients `[a_0..a_10, b_1..b_10]`; the objective is the mean absolute
//! error over the sampled responses, or [`WORST`] when the filter is
//! unstable.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::Serialize;

use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::problem::{Objective, Problem, WORST};
use crate::rng::RngStream;

/// Filter order (numerator degree `L` and denominator degree `M`).
pub const ORDER: usize = 10;
pub const N_COEFFS: usize = 2 * ORDER + 1;
pub const N_SAMPLES: usize = 1000;
pub const SAMPLE_PERIOD: f64 = 0.001;
pub const INPUT_PHASE: f64 = PI / 3.0;
pub const NOISE_AMPLITUDE: f64 = 0.01;
pub const DEFAULT_NOISE_SEED: u64 = 2011;
/// Evaluation budget per run for this problem.
pub const IIR_BUDGET: u64 = 10_000;
pub const IIR_LABEL: &str = "iir";

/// Plant numerator, coefficients of `z^0 .. z^-10`.
pub const PLANT_NUMERATOR: [f64; ORDER + 1] =
    [0.0, 1.0, -0.4, 0.08, -0.032, 0.0816, 0.0326, 0.0288, -0.0115, 0.1296, -0.0518];
/// Plant denominator, coefficients of `z^0 .. z^-10`.
pub const PLANT_DENOMINATOR: [f64; ORDER + 1] = [1.0, 0.0, 1.08, 0.0, 0.8726, 0.0, 0.6227, 0.0, 0.4694, 0.0, 0.1266];

/// How the `b` coefficients enter the filter recursion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DenominatorConvention {
    /// Denominator `1 + sum b_i z^-i`, i.e. `y(k) = sum a_i u(k-i) - sum b_i y(k-i)`.
    #[default]
    TransferFunction,
    /// `y(k) = sum b_i y(k-i) + sum a_i u(k-i)`, i.e. denominator `1 - sum b_i z^-i`.
    PrintedRecursion,
}

impl DenominatorConvention {
    fn sign(self) -> f64 {
        match self {
            DenominatorConvention::TransferFunction => -1.0,
            DenominatorConvention::PrintedRecursion => 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilterCoeffs {
    pub a: [f64; ORDER + 1],
    pub b: [f64; ORDER],
}

impl FilterCoeffs {
    pub fn unpack(x: &[f64]) -> Result<Self> {
        if x.len() != N_COEFFS {
            return Err(Error::DimensionMismatch { expected: N_COEFFS, actual: x.len() });
        }
        let mut a = [0.0; ORDER + 1];
        let mut b = [0.0; ORDER];
        a.copy_from_slice(&x[..=ORDER]);
        b.copy_from_slice(&x[ORDER + 1..]);
        Ok(FilterCoeffs { a, b })
    }

    pub fn pack(&self) -> Vec<f64> {
        self.a.iter().chain(&self.b).copied().collect()
    }

    /// The plant itself, expressed in `convention`.
    pub fn plant(convention: DenominatorConvention) -> Self {
        let mut b = [0.0; ORDER];
        for (bi, beta) in b.iter_mut().zip(&PLANT_DENOMINATOR[1..]) {
            *bi = -convention.sign() * beta;
        }
        FilterCoeffs { a: PLANT_NUMERATOR, b }
    }
}

/// Noise-free part of the input at sample `k`.
pub fn input_sample(k: usize, period: f64, phase: f64) -> f64 {
    let t = k as f64 * period;
    1.0 + 5.0 * (0.5 * PI * t).sin() + 0.25 * (4.0 * PI * t + phase).sin()
}

/// Input samples for `k = 1..=n` plus `noise_amplitude * U(0,1)` noise drawn
/// from `noise_seed`.
pub fn generate_input(n: usize, period: f64, phase: f64, noise_amplitude: f64, noise_seed: u64) -> Vec<f64> {
    let mut rng = RngStream::new(noise_seed);
    (1..=n).map(|k| input_sample(k, period, phase) + noise_amplitude * rng.uniform()).collect()
}

/// Plant output for input `u`, zero initial state.
pub fn simulate_plant(u: &[f64]) -> Vec<f64> {
    let mut d = vec![0.0; u.len()];
    for k in 0..u.len() {
        let mut acc = 0.0;
        for (i, alpha) in PLANT_NUMERATOR.iter().enumerate().take(k + 1) {
            acc += alpha * u[k - i];
        }
        for (i, beta) in PLANT_DENOMINATOR.iter().enumerate().skip(1).take(k) {
            acc -= beta * d[k - i];
        }
        d[k] = acc / PLANT_DENOMINATOR[0];
    }
    d
}

/// Filter output for input `u`, zero initial state, written into `y`.
pub fn filter_response_into(coeffs: &FilterCoeffs, u: &[f64], convention: DenominatorConvention, y: &mut [f64]) {
    assert_eq!(u.len(), y.len(), "input and output length differ");
    let s = convention.sign();
    for k in 0..u.len() {
        let mut acc = 0.0;
        for i in 0..=ORDER.min(k) {
            acc += coeffs.a[i] * u[k - i];
        }
        for i in 1..=ORDER.min(k) {
            acc += s * coeffs.b[i - 1] * y[k - i];
        }
        y[k] = acc;
    }
}

pub fn filter_response(coeffs: &FilterCoeffs, u: &[f64], convention: DenominatorConvention) -> Vec<f64> {
    let mut y = vec![0.0; u.len()];
    filter_response_into(coeffs, u, convention, &mut y);
    y
}

/// Whether every root of `poly` lies strictly inside the unit circle.
///
/// `poly` lists coefficients from the highest power down. Decided by the
/// Schur-Cohn/Jury step-down: with `k = p_n / p_0` the degree is reduced by
/// `p_i <- p_i - k p_{n-i}`; the roots are all inside iff `|k| < 1` at every
/// step.
pub fn jury_stable(poly: &[f64]) -> Result<bool> {
    let lead = *poly.first().ok_or(Error::DegeneratePolynomial)?;
    if lead == 0.0 || !lead.is_finite() {
        return Err(Error::DegeneratePolynomial);
    }
    if poly.iter().any(|c| !c.is_finite()) {
        return Ok(false);
    }
    let mut p: Vec<f64> = poly.iter().map(|c| c / lead).collect();
    while p.len() > 1 {
        let n = p.len() - 1;
        let k = p[n] / p[0];
        if k.abs() >= 1.0 {
            return Ok(false);
        }
        let next: Vec<f64> = (0..n).map(|i| p[i] - k * p[n - i]).collect();
        p = next;
    }
    Ok(true)
}

/// Characteristic polynomial `z^M + c_1 z^(M-1) + ... + c_M` of the filter
/// denominator.
pub fn characteristic_polynomial(b: &[f64], convention: DenominatorConvention) -> Vec<f64> {
    let s = -convention.sign();
    std::iter::once(1.0).chain(b.iter().map(|v| s * v)).collect()
}

pub fn is_stable(b: &[f64], convention: DenominatorConvention) -> bool {
    // The polynomial is monic, so it is never degenerate.
    jury_stable(&characteristic_polynomial(b, convention)).unwrap_or(false)
}

/// Input and plant output shared by every evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalPair {
    pub u: Vec<f64>,
    pub d: Vec<f64>,
    pub noise_seed: u64,
}

impl SignalPair {
    pub fn new(noise_seed: u64) -> Self {
        let u = generate_input(N_SAMPLES, SAMPLE_PERIOD, INPUT_PHASE, NOISE_AMPLITUDE, noise_seed);
        let d = simulate_plant(&u);
        SignalPair { u, d, noise_seed }
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }
}

/// Mean absolute error between `y` and `d`.
pub fn mean_absolute_error(d: &[f64], y: &[f64]) -> f64 {
    d.iter().zip(y).map(|(d, y)| (d - y).abs()).sum::<f64>() / d.len() as f64
}

pub fn mae_objective(coeffs: &FilterCoeffs, signals: &SignalPair, convention: DenominatorConvention) -> f64 {
    if !is_stable(&coeffs.b, convention) {
        return WORST;
    }
    let y = filter_response(coeffs, &signals.u, convention);
    mean_absolute_error(&signals.d, &y)
}

#[derive(Debug, Clone)]
pub struct IirObjective {
    signals: Arc<SignalPair>,
    convention: DenominatorConvention,
}

impl IirObjective {
    pub fn new(signals: Arc<SignalPair>, convention: DenominatorConvention) -> Self {
        IirObjective { signals, convention }
    }

    pub fn signals(&self) -> &SignalPair {
        &self.signals
    }
}

impl Objective for IirObjective {
    fn value(&self, x: &[f64]) -> f64 {
        match FilterCoeffs::unpack(x) {
            Ok(c) => mae_objective(&c, &self.signals, self.convention),
            Err(_) => WORST,
        }
    }
}

/// The identification problem on `[0, 1]^21`.
pub fn make_iir_problem(noise_seed: u64) -> Problem {
    make_iir_problem_with(Arc::new(SignalPair::new(noise_seed)), DenominatorConvention::default())
}

pub fn make_iir_problem_with(signals: Arc<SignalPair>, convention: DenominatorConvention) -> Problem {
    let domain = Domain::hypercube(N_COEFFS, 0.0, 1.0).expect("unit box is valid");
    Problem::new(IIR_LABEL, domain, IirObjective::new(signals, convention))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResponseRow {
    pub k: usize,
    pub u: f64,
    pub d: f64,
    pub y: f64,
}

/// Input, plant output and filter output per sample (`k` starts at 1).
pub fn response_table(coeffs: &FilterCoeffs, signals: &SignalPair, convention: DenominatorConvention) -> Vec<ResponseRow> {
    let y = filter_response(coeffs, &signals.u, convention);
    (0..signals.len())
        .map(|i| ResponseRow { k: i + 1, u: signals.u[i], d: signals.d[i], y: y[i] })
        .collect()
}
