//! Seedable, splittable randomness.
//!
//! Every stochastic operation in the crate takes a [`RandomSource`] explicitly.
//! Child sources are derived from a parent seed and a label, so the stream a
//! party sees in round `i` depends only on `(seed, trial, i, party)` and never
//! on how many draws some other party made.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Labels for the independent per-round streams.
pub mod stream {
    pub const ALICE: u64 = 0xA11CE;
    pub const BOB: u64 = 0xB0B;
    pub const CHANNEL: u64 = 0xC4A77E1;
    pub const EVE: u64 = 0xE7E;
}

#[derive(Debug, Clone)]
pub struct RandomSource {
    seed: u64,
    rng: ChaCha8Rng,
}

// SplitMix64 finalizer, used only to derive child seeds.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl RandomSource {
    pub fn from_seed(seed: u64) -> Self {
        Self {
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Derives an independent child stream. The result depends only on this
    /// source's seed and `label`, not on how much of this stream was consumed.
    pub fn fork(&self, label: u64) -> Self {
        Self::from_seed(mix(self.seed ^ mix(label)))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Uniform draw on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    /// Returns `true` with probability `p`.
    pub fn bernoulli(&mut self, p: f64) -> bool {
        if p <= 0.0 {
            false
        } else if p >= 1.0 {
            true
        } else {
            self.uniform() < p
        }
    }

    /// Uniform index in `0..n`. `n` must be nonzero.
    pub fn index(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }

    pub fn bit(&mut self) -> u8 {
        u8::from(self.rng.random::<bool>())
    }
}

impl RngCore for RandomSource {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}
