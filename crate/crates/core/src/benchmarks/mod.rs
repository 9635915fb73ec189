//! The thirty-problem test suite.
//!
//! Shift vectors, rotation matrices and the integer data of the Schwefel
//! 2.6/2.13 problems are regenerated from seeds and every bias is zero, so
//! the optimum value of every shifted problem is exactly 0.

mod fractal;
pub mod functions;
mod transform;

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use fractal::{doubledip, twist, Dip, FastFractal};
pub use transform::{generate_rotation, generate_shift, RotationMatrix, ShiftVector};

use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::problem::{Objective, Problem};
use crate::rng::{mix64, RngStream};

pub const SUITE_SIZE: u8 = 30;

/// The large-scale subset: f24 to f30 at n = 100.
pub const CEC2008_IDS: [u8; 7] = [24, 25, 26, 27, 28, 29, 30];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Modality {
    Unimodal,
    Multimodal,
}

/// Static description of one suite member.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub id: u8,
    pub name: &'static str,
    pub dimension: usize,
    pub lower: f64,
    pub upper: f64,
    pub modality: Modality,
    pub separable: bool,
    pub shifted: bool,
    pub rotated: bool,
    /// Seed all instance data is generated from.
    pub seed: u64,
}

impl ProblemSpec {
    pub fn label(&self) -> String {
        format!("f{}", self.id)
    }

    pub fn domain(&self) -> Domain {
        Domain::hypercube(self.dimension, self.lower, self.upper).expect("suite bounds are valid")
    }
}

struct Row {
    name: &'static str,
    n: usize,
    lower: f64,
    upper: f64,
    modality: Modality,
    separable: bool,
    shifted: bool,
    rotated: bool,
}

const fn row(
    name: &'static str,
    n: usize,
    lower: f64,
    upper: f64,
    modality: Modality,
    separable: bool,
    shifted: bool,
    rotated: bool,
) -> Row {
    Row {
        name,
        n,
        lower,
        upper,
        modality,
        separable,
        shifted,
        rotated,
    }
}

use Modality::{Multimodal as M, Unimodal as U};

#[rustfmt::skip]
const TABLE: [Row; 30] = [
    row("Shifted sphere",                      30, -100.0, 100.0, U, true,  true,  false),
    row("Shifted Schwefel 1.2",                30, -100.0, 100.0, U, false, true,  false),
    row("Rosenbrock",                          30, -100.0, 100.0, M, false, false, false),
    row("Shifted Ackley",                      30,  -32.0,  32.0, M, false, true,  false),
    row("Shifted rotated Ackley",              30,  -32.0,  32.0, M, false, true,  true),
    row("Shifted Griewank",                    30, -600.0, 600.0, M, false, true,  false),
    row("Shifted rotated Griewank",            30, -600.0, 600.0, M, false, true,  true),
    row("Shifted Rastrigin",                   30,   -5.0,   5.0, M, true,  true,  false),
    row("Shifted rotated Rastrigin",           30,   -5.0,   5.0, M, false, true,  true),
    row("Shifted non-continuous Rastrigin",    30, -500.0, 500.0, M, true,  true,  false),
    row("Schwefel",                            30, -500.0, 500.0, M, true,  false, false),
    row("Schwefel 2.22",                       10,  -10.0,  10.0, U, true,  false, false),
    row("Schwefel 2.21",                       10, -100.0, 100.0, U, false, false, false),
    row("Generalized penalized 1",             10,  -50.0,  50.0, M, true,  false, false),
    row("Generalized penalized 2",             10,  -50.0,  50.0, M, true,  false, false),
    row("Schwefel 2.6 (optimum on bounds)",    30, -100.0, 100.0, U, false, true,  false),
    row("Shifted rotated Weierstrass",         30,   -0.5,   0.5, M, false, true,  true),
    row("Schwefel 2.13",                       30,    -PI,    PI, M, false, true,  false),
    row("Shifted rotated Rastrigin",           50,   -5.0,   5.0, M, false, true,  true),
    row("Michalewicz",                         50,    0.0,    PI, M, true,  false, false),
    row("Schwefel",                            50, -500.0, 500.0, M, true,  false, false),
    row("Michalewicz",                        100,    0.0,    PI, M, true,  false, false),
    row("Schwefel",                           100, -500.0, 500.0, M, true,  false, false),
    row("Shifted sphere",                     100, -100.0, 100.0, U, true,  true,  false),
    row("Shifted Schwefel 2.21",              100, -100.0, 100.0, U, false, true,  false),
    row("Shifted Rosenbrock",                 100, -100.0, 100.0, M, false, true,  false),
    row("Shifted Rastrigin",                  100,   -5.0,   5.0, M, true,  true,  false),
    row("Shifted Griewank",                   100, -600.0, 600.0, M, false, true,  false),
    row("Shifted Ackley",                     100,  -32.0,  32.0, M, false, true,  false),
    row("FastFractal DoubleDip",              100,   -1.0,   1.0, M, false, false, false),
];

/// Condition number of the rotation used by a rotated problem.
fn condition_target(id: u8) -> f64 {
    match id {
        5 => 1.0,
        7 | 9 | 19 => 3.0,
        17 => 5.0,
        _ => 1.0,
    }
}

pub fn problem_spec(id: u8, master_seed: u64) -> Result<ProblemSpec> {
    if !(1..=SUITE_SIZE).contains(&id) {
        return Err(Error::InvalidParameter(format!("no test problem f{id}")));
    }
    let r = &TABLE[usize::from(id - 1)];
    Ok(ProblemSpec {
        id,
        name: r.name,
        dimension: r.n,
        lower: r.lower,
        upper: r.upper,
        modality: r.modality,
        separable: r.separable,
        shifted: r.shifted,
        rotated: r.rotated,
        seed: mix64(master_seed ^ u64::from(id)),
    })
}

pub fn suite_specs(master_seed: u64) -> Vec<ProblemSpec> {
    (1..=SUITE_SIZE)
        .map(|id| problem_spec(id, master_seed).expect("id in range"))
        .collect()
}

#[derive(Debug, Clone)]
enum Kind {
    Sphere,
    Schwefel12,
    Rosenbrock,
    /// Evaluated on `x - o + 1` so the optimum sits at `o`.
    ShiftedRosenbrock,
    Ackley,
    Griewank,
    Rastrigin,
    NonContinuousRastrigin,
    Schwefel,
    Schwefel222,
    MaxAbs,
    Penalized1,
    Penalized2,
    /// `max_i |A_i x - B_i|`, `B = A o`.
    Schwefel26 { a: Vec<f64>, b: Vec<f64> },
    Weierstrass,
    /// `sum_i (A_i - B_i(x))^2` with `A_i = B_i(alpha)`.
    Schwefel213 { a: Vec<f64>, b: Vec<f64>, target: Vec<f64> },
    Michalewicz,
    FastFractal(FastFractal),
}

/// An instantiated suite member.
#[derive(Debug, Clone)]
pub struct Benchmark {
    spec: ProblemSpec,
    kind: Kind,
    shift: Option<ShiftVector>,
    rotation: Option<RotationMatrix>,
}

impl Benchmark {
    pub fn new(spec: ProblemSpec) -> Self {
        let n = spec.dimension;
        let domain = spec.domain();
        let shift_seed = mix64(spec.seed ^ 0x5348_4946_54);
        let rotation_seed = mix64(spec.seed ^ 0x524f_54);
        let data_seed = mix64(spec.seed ^ 0x4441_5441);

        let mut shift = spec.shifted.then(|| generate_shift(&domain, shift_seed));
        let rotation = spec
            .rotated
            .then(|| generate_rotation(n, condition_target(spec.id), rotation_seed));

        let kind = match spec.id {
            1 | 24 => Kind::Sphere,
            2 => Kind::Schwefel12,
            3 => Kind::Rosenbrock,
            26 => Kind::ShiftedRosenbrock,
            4 | 5 | 29 => Kind::Ackley,
            6 | 7 | 28 => Kind::Griewank,
            8 | 9 | 19 | 27 => Kind::Rastrigin,
            10 => Kind::NonContinuousRastrigin,
            11 | 21 | 23 => Kind::Schwefel,
            12 => Kind::Schwefel222,
            13 | 25 => Kind::MaxAbs,
            14 => Kind::Penalized1,
            15 => Kind::Penalized2,
            16 => {
                let o = shift.as_mut().expect("f16 is shifted");
                place_on_bounds(&mut o.o, spec.lower, spec.upper);
                let a = nonsingular_integer_matrix(n, 500, data_seed);
                let b = a.chunks_exact(n).map(|row| dot(row, &o.o)).collect();
                Kind::Schwefel26 { a, b }
            }
            17 => Kind::Weierstrass,
            18 => {
                let alpha = &shift.as_ref().expect("f18 is shifted").o;
                let mut rng = RngStream::new(data_seed);
                let mut ints = || (rng.index(201) as f64) - 100.0;
                let a: Vec<f64> = (0..n * n).map(|_| ints()).collect();
                let b: Vec<f64> = (0..n * n).map(|_| ints()).collect();
                let target = schwefel213_inner(&a, &b, alpha);
                Kind::Schwefel213 { a, b, target }
            }
            20 | 22 => Kind::Michalewicz,
            30 => Kind::FastFractal(FastFractal::new(data_seed)),
            _ => unreachable!("ids are validated by problem_spec"),
        };
        Self {
            spec,
            kind,
            shift,
            rotation,
        }
    }

    pub fn spec(&self) -> &ProblemSpec {
        &self.spec
    }

    pub fn shift(&self) -> Option<&ShiftVector> {
        self.shift.as_ref()
    }

    pub fn rotation(&self) -> Option<&RotationMatrix> {
        self.rotation.as_ref()
    }

    /// Value at the global minimum, where it is known exactly.
    pub fn known_optimum(&self) -> Option<f64> {
        match self.spec.id {
            11 | 20 | 21 | 22 | 23 | 30 => None,
            _ => Some(0.0),
        }
    }

    /// Location of the global minimum, where it is known.
    pub fn optimum_point(&self) -> Option<Vec<f64>> {
        let n = self.spec.dimension;
        match self.spec.id {
            3 => Some(vec![1.0; n]),
            11 | 21 | 23 => Some(vec![420.968_746_359_982; n]),
            12 | 13 => Some(vec![0.0; n]),
            14 => Some(vec![-1.0; n]),
            15 => Some(vec![1.0; n]),
            _ => self.shift.as_ref().map(|s| s.o.clone()),
        }
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.spec.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.spec.dimension,
                actual: x.len(),
            });
        }
        Ok(self.eval_unchecked(x))
    }

    fn eval_unchecked(&self, x: &[f64]) -> f64 {
        use functions::*;
        match &self.kind {
            Kind::Rosenbrock => rosenbrock(x),
            Kind::Schwefel => schwefel(x),
            Kind::Schwefel222 => schwefel_2_22(x),
            Kind::Penalized1 => penalized_1(x),
            Kind::Penalized2 => penalized_2(x),
            Kind::Michalewicz => michalewicz(x),
            Kind::FastFractal(f) => f.value(x),
            Kind::Schwefel26 { a, b } => a
                .chunks_exact(x.len())
                .zip(b)
                .fold(0.0, |m, (row, bi)| f64::max(m, (dot(row, x) - bi).abs())),
            Kind::Schwefel213 { a, b, target } => schwefel213_inner(a, b, x)
                .iter()
                .zip(target)
                .map(|(v, t)| (t - v) * (t - v))
                .sum(),
            Kind::MaxAbs if self.shift.is_none() => max_abs(x),
            _ => {
                let z = self.transform(x);
                match &self.kind {
                    Kind::Sphere => sphere(&z),
                    Kind::Schwefel12 => schwefel_1_2(&z),
                    Kind::ShiftedRosenbrock => {
                        let z: Vec<f64> = z.iter().map(|v| v + 1.0).collect();
                        rosenbrock(&z)
                    }
                    Kind::Ackley => ackley(&z),
                    Kind::Griewank => griewank(&z),
                    Kind::Rastrigin => rastrigin(&z),
                    Kind::NonContinuousRastrigin => noncontinuous_rastrigin(&z),
                    Kind::MaxAbs => max_abs(&z),
                    Kind::Weierstrass => weierstrass(&z),
                    _ => unreachable!(),
                }
            }
        }
    }

    /// `z = x - o`, then `z = M z` for rotated problems.
    fn transform(&self, x: &[f64]) -> Vec<f64> {
        let z: Vec<f64> = match &self.shift {
            Some(s) => x.iter().zip(&s.o).map(|(a, b)| a - b).collect(),
            None => x.to_vec(),
        };
        match &self.rotation {
            Some(m) => {
                let mut out = vec![0.0; z.len()];
                m.apply(&z, &mut out);
                out
            }
            None => z,
        }
    }
}

impl Objective for Benchmark {
    fn value(&self, x: &[f64]) -> f64 {
        self.eval_unchecked(x)
    }
}

pub fn eval_benchmark(benchmark: &Benchmark, x: &[f64]) -> Result<f64> {
    benchmark.eval(x)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

// First quarter of the coordinates at the lower bound, last quarter at the
// upper bound.
fn place_on_bounds(o: &mut [f64], lower: f64, upper: f64) {
    let n = o.len();
    let head = n.div_ceil(4);
    let tail = (3 * n) / 4;
    for (i, v) in o.iter_mut().enumerate() {
        if i < head {
            *v = lower;
        } else if i >= tail {
            *v = upper;
        }
    }
}

fn nonsingular_integer_matrix(n: usize, bound: usize, seed: u64) -> Vec<f64> {
    let mut rng = RngStream::new(seed);
    loop {
        let a: Vec<f64> = (0..n * n)
            .map(|_| rng.index(2 * bound + 1) as f64 - bound as f64)
            .collect();
        let det = nalgebra::DMatrix::from_row_slice(n, n, &a).determinant();
        if det.is_finite() && det.abs() > 1e-6 {
            return a;
        }
    }
}

fn schwefel213_inner(a: &[f64], b: &[f64], x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let (s, c): (Vec<f64>, Vec<f64>) = x.iter().map(|v| v.sin_cos()).unzip();
    a.chunks_exact(n)
        .zip(b.chunks_exact(n))
        .map(|(ar, br)| dot(ar, &s) + dot(br, &c))
        .collect()
}

pub fn make_benchmark(id: u8, master_seed: u64) -> Result<Benchmark> {
    Ok(Benchmark::new(problem_spec(id, master_seed)?))
}

pub fn make_problem(id: u8, master_seed: u64) -> Result<Problem> {
    Ok(into_problem(make_benchmark(id, master_seed)?))
}

pub fn into_problem(benchmark: Benchmark) -> Problem {
    let label = benchmark.spec.label();
    let domain = benchmark.spec.domain();
    let optimum = benchmark.known_optimum();
    let p = Problem::from_shared(label, domain, Arc::new(benchmark));
    match optimum {
        Some(v) => p.with_known_optimum(v),
        None => p,
    }
}

/// f1 to f30, in order.
pub fn make_suite(master_seed: u64) -> Vec<Problem> {
    (1..=SUITE_SIZE)
        .map(|id| make_problem(id, master_seed).expect("id in range"))
        .collect()
}

/// Tab-separated provenance table: id, name, n, bounds, seed.
pub fn manifest(specs: &[ProblemSpec]) -> String {
    let mut out = String::from("id\tname\tn\tlower\tupper\tseed\n");
    for s in specs {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}",
            s.label(),
            s.name,
            s.dimension,
            s.lower,
            s.upper,
            s.seed
        );
    }
    out
}
