//! Seeded random streams.
//!
//! Every random quantity in the crate is drawn from a [`SampleRng`], a
//! ChaCha8 stream keyed by a 64-bit seed. Parallel work never shares a stream:
//! sample `i` of a run seeded with `s` uses `derive_seed(s, i)`, so results do
//! not depend on how indices are partitioned across workers.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for sample `index` of a run keyed by `base`.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    mix64(
        mix64(base.wrapping_add(0x9E37_79B9_7F4A_7C15)) ^ index.wrapping_mul(0xD6E8_FEB8_6659_FD93),
    )
}

/// Seed for retry `attempt` of sample `index` (attempt 0 is the first try).
pub fn derive_retry_seed(base: u64, index: u64, attempt: u32) -> u64 {
    if attempt == 0 {
        derive_seed(base, index)
    } else {
        derive_seed(
            derive_seed(base ^ 0xA5A5_A5A5_5A5A_5A5A, attempt as u64),
            index,
        )
    }
}

pub struct SampleRng {
    inner: ChaCha8Rng,
}

impl SampleRng {
    pub fn new(seed: u64) -> Self {
        Self {
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Uniform on the open interval (0, 1).
    pub fn uniform_open(&mut self) -> f64 {
        loop {
            // 53 random mantissa bits; reject the single zero outcome
            let u = (self.inner.random::<u64>() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
            if u > 0.0 {
                return u;
            }
        }
    }

    /// Uniform on [0, 1).
    pub fn uniform(&mut self) -> f64 {
        (self.inner.random::<u64>() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn exponential(&mut self) -> f64 {
        -self.uniform_open().ln()
    }

    /// Pair of independent standard normals (Box–Muller).
    pub fn normal_pair(&mut self) -> (f64, f64) {
        let r = (-2.0 * self.uniform_open().ln()).sqrt();
        let theta = std::f64::consts::TAU * self.uniform();
        (r * theta.cos(), r * theta.sin())
    }

    pub fn standard_normal(&mut self) -> f64 {
        self.normal_pair().0
    }

    /// Circular complex Gaussian with `E|w|² = variance` and `E w² = 0`.
    pub fn complex_gaussian(&mut self, variance: f64) -> Complex64 {
        let (x, y) = self.normal_pair();
        let s = (0.5 * variance).sqrt();
        Complex64::new(x * s, y * s)
    }

    pub fn inner_mut(&mut self) -> &mut ChaCha8Rng {
        &mut self.inner
    }
}
