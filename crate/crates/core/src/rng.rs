//! Seeded generator used for instance generation: the splitmix64 stream,
//! `x += 0x9E3779B97F4A7C15; z = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9;`
//! `z = (z ^ (z >> 27)) * 0x94D049BB133111EB; z ^= z >> 31` (wrapping).

use rand::{Rng, RngExt, SeedableRng};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitMix64(rand_xoshiro::SplitMix64);

pub const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64(rand_xoshiro::SplitMix64::seed_from_u64(seed))
    }

    /// Generator for item `index` of the stream identified by `seed`,
    /// independent of how many values other items consumed. Its seed is
    /// output `index` of the splitmix stream started at `seed`.
    pub fn derive(seed: u64, index: u64) -> Self {
        SplitMix64::new(SplitMix64::new(seed.wrapping_add(GOLDEN.wrapping_mul(index))).next_u64())
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform in `[0, n)`. `n` must be > 0.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "empty range");
        self.0.random_range(0..n)
    }

    /// Uniform in `[lo, hi]`.
    pub fn range(&mut self, lo: u64, hi: u64) -> u64 {
        self.0.random_range(lo..=hi)
    }
}
