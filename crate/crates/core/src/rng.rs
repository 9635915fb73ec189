//! Deterministic random streams and seed derivation.
//!
//! Every run owns one [`RngStream`]. Streams are ChaCha8 generators, whose
//! output sequence is fixed by the seed and stable across platforms, so an
//! experiment can be replayed bit for bit from its master seed.
//!
//! Run seeds are derived as
//!
//! ```text
//! seed = mix(mix(mix(master ^ fnv1a(problem)) ^ fnv1a(algorithm)) ^ run_index)
//! ```
//!
//! where `mix` is the SplitMix64 finalizer and `fnv1a` the 64-bit FNV-1a
//! hash of the identifier's UTF-8 bytes.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct RngStream {
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self {
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Uniform draw in `[0, 1)`.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        // 53 random mantissa bits.
        (self.inner.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform draw in `(0, 1]`.
    #[inline]
    pub fn uniform_open_closed(&mut self) -> f64 {
        1.0 - self.uniform()
    }

    /// Uniform draw in `[low, high)`.
    #[inline]
    pub fn uniform_in(&mut self, low: f64, high: f64) -> f64 {
        low + (high - low) * self.uniform()
    }

    /// Uniform index in `0..n`. `n` must be positive.
    #[inline]
    pub fn index(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        // Lemire's multiply-shift; the bias is below 2^-32 for any n we use.
        ((self.inner.next_u64() >> 32) * n as u64 >> 32) as usize
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.inner.fill_bytes(dest)
    }
}

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// 64-bit FNV-1a.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xCBF2_9CE4_8422_2325, |h, &b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01B3)
    })
}

/// Seed for run `run_index` of `algorithm` on `problem` under `master`.
pub fn derive_seed(master: u64, problem: &str, algorithm: &str, run_index: u64) -> u64 {
    let h = mix64(master ^ fnv1a(problem.as_bytes()));
    let h = mix64(h ^ fnv1a(algorithm.as_bytes()));
    mix64(h ^ run_index)
}
