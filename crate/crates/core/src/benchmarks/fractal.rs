//! FastFractal "DoubleDip" function.
//!
//! `fractal1D` is a fixed sum of double-dip kernels whose number, centres
//! and depths are drawn from a stream seeded by the instance seed, so a
//! given seed always yields the same landscape. The kernel set is built
//! once at construction.

use serde::{Deserialize, Serialize};

use crate::rng::RngStream;

pub const LEVELS: u32 = 3;

/// `(-6144 t^6 + 3088 t^4 - 392 t^2 + 1) s` for `|x - c| < 1/2`, else 0.
/// The polynomial is 1 at the centre, has two minima at `|t| ~ 0.29` and
/// returns to 0 at the window edges.
#[inline]
pub fn doubledip(x: f64, c: f64, s: f64) -> f64 {
    let t = x - c;
    if t > -0.5 && t < 0.5 {
        let t2 = t * t;
        let t4 = t2 * t2;
        (-6144.0 * t4 * t2 + 3088.0 * t4 - 392.0 * t2 + 1.0) * s
    } else {
        0.0
    }
}

/// `4 (y^4 - 2 y^3 + y^2)`, which couples each coordinate to its successor.
#[inline]
pub fn twist(y: f64) -> f64 {
    let y2 = y * y;
    4.0 * (y2 * y2 - 2.0 * y2 * y + y2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Dip {
    pub center: f64,
    pub scale: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FastFractal {
    pub seed: u64,
    dips: Vec<Dip>,
}

impl FastFractal {
    /// Level `k` (1-based) contributes `2^(k-1)` slots of 0, 1 or 2 kernels
    /// each, centred uniformly in `[0, 1]` with depth
    /// `1 / (2^(k-1) (2 - r))`, `r` uniform in `[0, 1]`.
    pub fn new(seed: u64) -> Self {
        let mut rng = RngStream::new(seed);
        let mut dips = Vec::new();
        for k in 1..=LEVELS {
            let level_scale = f64::from(1u32 << (k - 1));
            for _ in 0..(1u32 << (k - 1)) {
                let count = rng.index(3);
                for _ in 0..count {
                    let center = rng.uniform();
                    let scale = 1.0 / (level_scale * (2.0 - rng.uniform()));
                    dips.push(Dip { center, scale });
                }
            }
        }
        Self { seed, dips }
    }

    pub fn dips(&self) -> &[Dip] {
        &self.dips
    }

    pub fn fractal_1d(&self, x: f64) -> f64 {
        self.dips.iter().map(|d| doubledip(x, d.center, d.scale)).sum()
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        let n = x.len();
        (0..n)
            .map(|i| self.fractal_1d(x[i] + twist(x[(i + 1) % n])))
            .sum()
    }
}
