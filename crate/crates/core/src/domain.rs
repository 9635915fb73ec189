//! Box-bounded decision spaces, uniform sampling and toroidal bound handling.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Per-dimension lower and upper bounds. Every interval is non-empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Domain {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() {
            return Err(Error::InvalidDomain("zero dimensions".into()));
        }
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch {
                expected: lower.len(),
                actual: upper.len(),
            });
        }
        for (i, (&a, &b)) in lower.iter().zip(&upper).enumerate() {
            if !(a.is_finite() && b.is_finite() && a < b) {
                return Err(Error::InvalidDomain(format!(
                    "dimension {i}: bounds [{a}, {b}] are not a finite non-empty interval"
                )));
            }
        }
        Ok(Self { lower, upper })
    }

    /// `[lower, upper]^n`.
    pub fn hypercube(n: usize, lower: f64, upper: f64) -> Result<Self> {
        Self::new(vec![lower; n], vec![upper; n])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn width(&self, i: usize) -> f64 {
        self.upper[i] - self.lower[i]
    }

    /// Per-dimension widths scaled by `fraction`.
    pub fn scaled_widths(&self, fraction: f64) -> Vec<f64> {
        (0..self.dim()).map(|i| fraction * self.width(i)).collect()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(&v, (&a, &b))| a <= v && v <= b)
    }

    /// A point drawn uniformly from the box.
    pub fn sample(&self, rng: &mut RngStream) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(&a, &b)| rng.uniform_in(a, b))
            .collect()
    }

    /// Toroidal correction in place.
    pub fn wrap(&self, x: &mut [f64]) {
        for ((v, &a), &b) in x.iter_mut().zip(&self.lower).zip(&self.upper) {
            *v = wrap_component(*v, a, b);
        }
    }

    #[inline]
    pub fn wrap_at(&self, i: usize, v: f64) -> f64 {
        wrap_component(v, self.lower[i], self.upper[i])
    }
}

/// Maps `v` back into `[a, b]` by wrapping around the interval: `b + t`
/// becomes `a + t` and `a - t` becomes `b - t`. Overshoots of any size are
/// reduced modulo the width. In-bounds values are returned untouched.
#[inline]
pub fn wrap_component(v: f64, a: f64, b: f64) -> f64 {
    if (a..=b).contains(&v) {
        return v;
    }
    let r = (v - a).rem_euclid(b - a);
    (a + r).min(b)
}

pub fn uniform_sample(domain: &Domain, rng: &mut RngStream) -> Vec<f64> {
    domain.sample(rng)
}

pub fn toroidal_correct(x: &[f64], domain: &Domain) -> Vec<f64> {
    let mut out = x.to_vec();
    domain.wrap(&mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn modular_oracle(x: f64, a: f64, b: f64) -> f64 {
        // Floor-based modulo, computed independently of rem_euclid.
        let w = b - a;
        let t = x - a;
        a + (t - w * (t / w).floor())
    }

    #[test]
    fn wraps_upper_overshoot() {
        let d = Domain::hypercube(1, 0.0, 10.0).unwrap();
        assert_eq!(toroidal_correct(&[12.0], &d), vec![2.0]);
    }

    #[test]
    fn in_bounds_identity() {
        let d = Domain::hypercube(1, -100.0, 100.0).unwrap();
        assert_eq!(toroidal_correct(&[50.0], &d), vec![50.0]);
        assert_eq!(toroidal_correct(&[100.0], &d), vec![100.0]);
        assert_eq!(toroidal_correct(&[-100.0], &d), vec![-100.0]);
    }

    #[test]
    fn wraps_lower_overshoot() {
        let d = Domain::hypercube(1, 0.0, 10.0).unwrap();
        assert_eq!(toroidal_correct(&[-3.0], &d), vec![7.0]);
        assert!((modular_oracle(-3.0, 0.0, 10.0) - 7.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_domains() {
        assert!(Domain::new(vec![1.0], vec![1.0]).is_err());
        assert!(Domain::new(vec![0.0, 0.0], vec![1.0]).is_err());
        assert!(Domain::new(vec![], vec![]).is_err());
        assert!(Domain::new(vec![f64::NEG_INFINITY], vec![0.0]).is_err());
    }

    #[test]
    fn sampling_is_in_range_and_deterministic() {
        let d = Domain::hypercube(30, -100.0, 100.0).unwrap();
        let mut r1 = RngStream::new(5);
        let mut r2 = RngStream::new(5);
        let a = uniform_sample(&d, &mut r1);
        let b = uniform_sample(&d, &mut r2);
        assert_eq!(a, b);
        assert!(d.contains(&a));
        let unit = Domain::hypercube(3, 0.0, 1.0).unwrap();
        assert!(unit.contains(&uniform_sample(&unit, &mut r1)));
    }

    #[test]
    fn sample_means_center_on_midpoint() {
        let d = Domain::new(vec![-5.0, 0.0, 10.0], vec![5.0, 1.0, 30.0]).unwrap();
        let mut rng = RngStream::new(2024);
        let draws = 100_000;
        let mut sums = [0.0; 3];
        for _ in 0..draws {
            let x = d.sample(&mut rng);
            assert!(d.contains(&x));
            for (s, v) in sums.iter_mut().zip(&x) {
                *s += v;
            }
        }
        for i in 0..3 {
            let mean = sums[i] / draws as f64;
            let mid = 0.5 * (d.lower()[i] + d.upper()[i]);
            // Standard error of a uniform mean: width / sqrt(12 * draws).
            let se = d.width(i) / (12.0 * draws as f64).sqrt();
            assert!((mean - mid).abs() < 3.0 * se, "dim {i}: {mean} vs {mid}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]

        #[test]
        fn wrap_matches_modular_oracle(
            a in -1e3f64..1e3,
            w in 1e-3f64..1e3,
            x in -1e4f64..1e4,
        ) {
            let b = a + w;
            let got = wrap_component(x, a, b);
            prop_assert!(got >= a && got <= b);
            if (a..=b).contains(&x) {
                prop_assert_eq!(got, x);
            } else {
                let want = modular_oracle(x, a, b);
                // Equal modulo the width; the endpoints a and b are the same
                // point on the torus.
                let diff = (got - want).abs();
                let tol = 1e-9 * (1.0 + x.abs());
                prop_assert!(diff < tol || (diff - w).abs() < tol,
                    "x={x} [{a},{b}] got {got} want {want}");
            }
            prop_assert_eq!(wrap_component(got, a, b), got);
        }
    }
}
