//! Stable seeded hashing for the reproducible rule generators.
//!
//! `std::hash` gives no cross-version stability, so the rules that flip
//! seeded coins per pair or per tuple fold their inputs through SplitMix64.

use crate::lattice::Point;

#[derive(Clone, Copy, Debug)]
pub struct SeededHash(u64);

impl SeededHash {
    pub fn new(seed: u64, domain_tag: u64) -> Self {
        SeededHash(splitmix64(seed ^ splitmix64(domain_tag)))
    }

    pub fn u64(mut self, v: u64) -> Self {
        self.0 = splitmix64(self.0 ^ v.wrapping_mul(0x9E37_79B9_7F4A_7C15));
        self
    }

    pub fn point(mut self, p: &Point) -> Self {
        self = self.u64(p.arity() as u64);
        for &c in p.coords() {
            self = self.u64(c);
        }
        self
    }

    pub fn finish(self) -> u64 {
        splitmix64(self.0)
    }

    /// Uniform in `[0, 1)`.
    pub fn unit(self) -> f64 {
        (self.finish() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Uniform-ish in `0..n`; `n` must be nonzero.
    pub fn below(self, n: u64) -> u64 {
        self.finish() % n
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
