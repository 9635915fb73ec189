//! Seeded shift vectors and rotation matrices.

use nalgebra::DMatrix;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::domain::Domain;
use crate::rng::RngStream;

/// Shifted optimum `o`, drawn uniformly from the central 80% of every
/// dimension's range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftVector {
    pub o: Vec<f64>,
    pub seed: u64,
}

pub fn generate_shift(domain: &Domain, seed: u64) -> ShiftVector {
    let mut rng = RngStream::new(seed);
    let o = (0..domain.dim())
        .map(|i| {
            let margin = 0.1 * domain.width(i);
            rng.uniform_in(domain.lower()[i] + margin, domain.upper()[i] - margin)
        })
        .collect();
    ShiftVector { o, seed }
}

/// Dense `n x n` linear map stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RotationMatrix {
    n: usize,
    data: Vec<f64>,
    pub condition_target: f64,
    pub seed: u64,
}

impl RotationMatrix {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.n + col]
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.n, self.n, &self.data)
    }

    /// `out = M x`.
    pub fn apply(&self, x: &[f64], out: &mut [f64]) {
        for (row, o) in self.data.chunks_exact(self.n).zip(out.iter_mut()) {
            *o = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }
}

/// `M = U S V^T` with `U`, `V` Haar-random orthogonal matrices and singular
/// values spaced geometrically from 1 to `condition_target`.
pub fn generate_rotation(n: usize, condition_target: f64, seed: u64) -> RotationMatrix {
    assert!(condition_target >= 1.0, "condition target must be >= 1");
    let mut rng = RngStream::new(seed);
    let u = random_orthogonal(n, &mut rng);
    let v = random_orthogonal(n, &mut rng);
    let singular = DMatrix::from_diagonal(&nalgebra::DVector::from_fn(n, |i, _| {
        if n == 1 {
            1.0
        } else {
            condition_target.powf(i as f64 / (n - 1) as f64)
        }
    }));
    let m = u * singular * v.transpose();
    let mut data = Vec::with_capacity(n * n);
    for r in 0..n {
        for c in 0..n {
            data.push(m[(r, c)]);
        }
    }
    RotationMatrix {
        n,
        data,
        condition_target,
        seed,
    }
}

// QR of a Gaussian matrix with the signs of R's diagonal folded into Q.
fn random_orthogonal(n: usize, rng: &mut RngStream) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| StandardNormal.sample(rng));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}
