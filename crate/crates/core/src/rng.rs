//! Seeded pseudo-random numbers for reproducible test instances.
//!
//! The generator is SplitMix64 (Steele, Lea & Flood) with its published
//! constants. Doubles are formed from the top 53 bits of each output, and
//! normal deviates use the cosine branch of Box-Muller, consuming exactly two
//! raw outputs per deviate. These three rules are all another implementation
//! needs to reproduce every random instance bit for bit.

use rand_core::{Rng, SeedableRng};

/// SplitMix64 generator with the sampling rules above.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    inner: rand_xoshiro::SplitMix64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { inner: rand_xoshiro::SplitMix64::seed_from_u64(seed) }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform double in `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform double in `[lo, hi)`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Standard normal deviate.
    pub fn gaussian(&mut self) -> f64 {
        // 1 - u lies in (0, 1], so the log is finite.
        let u1 = 1.0 - self.next_f64();
        let u2 = self.next_f64();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    pub fn gaussian_vec(&mut self, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.gaussian()).collect()
    }

    /// Uniform index in `0..n`. `n` must be positive.
    pub fn below(&mut self, n: usize) -> usize {
        (self.next_f64() * n as f64) as usize % n
    }
}
