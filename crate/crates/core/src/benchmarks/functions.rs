//! Raw test-function formulas. Each takes the already transformed vector
//! (shifted and, where applicable, rotated).

use std::f64::consts::{E, PI};

const TWO_PI: f64 = 2.0 * PI;

pub fn sphere(z: &[f64]) -> f64 {
    z.iter().map(|v| v * v).sum()
}

/// Schwefel 1.2: sum of squared prefix sums.
pub fn schwefel_1_2(z: &[f64]) -> f64 {
    z.iter()
        .scan(0.0, |acc, &v| {
            *acc += v;
            Some(*acc * *acc)
        })
        .sum()
}

pub fn rosenbrock(x: &[f64]) -> f64 {
    x.windows(2)
        .map(|w| {
            let a = w[1] - w[0] * w[0];
            let b = 1.0 - w[0];
            100.0 * a * a + b * b
        })
        .sum()
}

pub fn ackley(z: &[f64]) -> f64 {
    let n = z.len() as f64;
    let (sq, cs) = z
        .iter()
        .fold((0.0, 0.0), |(s, c), &v| (s + v * v, c + (TWO_PI * v).cos()));
    -20.0 * (-0.2 * (sq / n).sqrt()).exp() - (cs / n).exp() + 20.0 + E
}

pub fn griewank(z: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut prod = 1.0;
    for (i, &v) in z.iter().enumerate() {
        sum += v * v;
        prod *= (v / ((i + 1) as f64).sqrt()).cos();
    }
    sum / 4000.0 - prod + 1.0
}

pub fn rastrigin(z: &[f64]) -> f64 {
    10.0 * z.len() as f64 + z.iter().map(|&v| v * v - 10.0 * (TWO_PI * v).cos()).sum::<f64>()
}

/// Rastrigin's non-continuous variant: coordinates at distance >= 1/2 from
/// the optimum are snapped to the half-integer grid.
pub fn noncontinuous_rastrigin(z: &[f64]) -> f64 {
    10.0 * z.len() as f64
        + z.iter()
            .map(|&v| {
                let y = snap_half(v);
                y * y - 10.0 * (TWO_PI * y).cos()
            })
            .sum::<f64>()
}

#[inline]
pub fn snap_half(z: f64) -> f64 {
    if z.abs() < 0.5 {
        z
    } else {
        (2.0 * z).round() / 2.0
    }
}

pub fn schwefel(x: &[f64]) -> f64 {
    418.9829 * x.len() as f64 - x.iter().map(|&v| v * v.abs().sqrt().sin()).sum::<f64>()
}

/// Schwefel 2.22.
pub fn schwefel_2_22(x: &[f64]) -> f64 {
    let (s, p) = x.iter().fold((0.0, 1.0), |(s, p), &v| (s + v.abs(), p * v.abs()));
    s + p
}

/// Schwefel 2.21.
pub fn max_abs(z: &[f64]) -> f64 {
    z.iter().fold(0.0, |m, &v| m.max(v.abs()))
}

/// Boundary penalty `u(x, a, k, m)`: zero on `[-a, a]`, `k (|x| - a)^m`
/// outside.
#[inline]
pub fn penalty(x: f64, a: f64, k: f64, m: i32) -> f64 {
    if x > a {
        k * (x - a).powi(m)
    } else if x < -a {
        k * (-x - a).powi(m)
    } else {
        0.0
    }
}

/// Generalized penalized function 1 with `y_i = 1 + (x_i + 1) / 4`.
pub fn penalized_1(x: &[f64]) -> f64 {
    let n = x.len();
    let y = |v: f64| 1.0 + 0.25 * (v + 1.0);
    let s1 = (PI * y(x[0])).sin();
    let body: f64 = x
        .iter()
        .map(|&v| {
            let yi = y(v);
            let s = (PI * yi).sin();
            (yi - 1.0).powi(2) * (1.0 + 10.0 * s * s)
        })
        .sum();
    let tail = (y(x[n - 1]) - 1.0).powi(2);
    let pen: f64 = x.iter().map(|&v| penalty(v, 10.0, 100.0, 4)).sum();
    PI / n as f64 * (10.0 * s1 * s1 + body + tail) + pen
}

/// Generalized penalized function 2.
pub fn penalized_2(x: &[f64]) -> f64 {
    let n = x.len();
    let s1 = (3.0 * PI * x[0]).sin();
    let body: f64 = x
        .windows(2)
        .map(|w| {
            let s = (3.0 * PI * w[1]).sin();
            (w[0] - 1.0).powi(2) * (1.0 + s * s)
        })
        .sum();
    let xn = x[n - 1];
    let sn = (TWO_PI * xn).sin();
    let tail = (xn - 1.0).powi(2) * (1.0 + sn * sn);
    let pen: f64 = x.iter().map(|&v| penalty(v, 5.0, 100.0, 4)).sum();
    0.1 * (s1 * s1 + body + tail) + pen
}

pub const WEIERSTRASS_A: f64 = 0.5;
pub const WEIERSTRASS_B: f64 = 3.0;
pub const WEIERSTRASS_KMAX: usize = 20;

pub fn weierstrass(z: &[f64]) -> f64 {
    let n = z.len() as f64;
    let mut ak = [0.0; WEIERSTRASS_KMAX + 1];
    let mut bk = [0.0; WEIERSTRASS_KMAX + 1];
    let mut offset = 0.0;
    for k in 0..=WEIERSTRASS_KMAX {
        ak[k] = WEIERSTRASS_A.powi(k as i32);
        bk[k] = WEIERSTRASS_B.powi(k as i32);
        offset += ak[k] * (PI * bk[k]).cos();
    }
    let sum: f64 = z
        .iter()
        .map(|&v| {
            (0..=WEIERSTRASS_KMAX)
                .map(|k| ak[k] * (TWO_PI * bk[k] * (v + 0.5)).cos())
                .sum::<f64>()
        })
        .sum();
    sum - n * offset
}

pub const MICHALEWICZ_M: i32 = 10;

pub fn michalewicz(x: &[f64]) -> f64 {
    -x.iter()
        .enumerate()
        .map(|(i, &v)| v.sin() * ((i + 1) as f64 * v * v / PI).sin().powi(2 * MICHALEWICZ_M))
        .sum::<f64>()
}
