//! PCG32 (XSH-RR, 64-bit state) and the handful of samplers built on it.
//!
//! Every sampler here is specified down to the number of 32-bit outputs it
//! consumes so that populations and training runs can be reproduced bit for
//! bit by other implementations. Library distributions are deliberately not
//! used.

use std::f64::consts::PI;

const MULTIPLIER: u64 = 6364136223846793005;

/// PCG-XSH-RR-64/32 generator.
///
/// Seeding follows the reference `pcg32_srandom_r`: the increment is
/// `(stream << 1) | 1`, the state starts at zero, is advanced once, has the
/// seed added, and is advanced again.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pcg32 {
    state: u64,
    increment: u64,
}

impl Pcg32 {
    pub fn new(seed: u64, stream: u64) -> Pcg32 {
        let mut rng = Pcg32 {
            state: 0,
            increment: (stream << 1) | 1,
        };
        rng.step();
        rng.state = rng.state.wrapping_add(seed);
        rng.step();
        rng
    }

    pub fn state(&self) -> u64 {
        self.state
    }

    pub fn increment(&self) -> u64 {
        self.increment
    }

    #[inline]
    fn step(&mut self) {
        self.state = self
            .state
            .wrapping_mul(MULTIPLIER)
            .wrapping_add(self.increment);
    }

    #[inline]
    pub fn next_u32(&mut self) -> u32 {
        let old = self.state;
        self.step();
        let xorshifted = (((old >> 18) ^ old) >> 27) as u32;
        let rot = (old >> 59) as u32;
        xorshifted.rotate_right(rot)
    }

    /// One output scaled to `[0, 1)` as `u32 / 2^32`.
    #[inline]
    pub fn next_unit(&mut self) -> f64 {
        self.next_u32() as f64 / 4294967296.0
    }

    /// Unbiased integer in `[0, n)`. Outputs at or above the largest
    /// multiple of `n` not exceeding `2^32` are rejected and redrawn.
    pub fn uniform_int(&mut self, n: u32) -> u32 {
        assert!(n >= 1, "uniform_int needs n >= 1");
        let limit = (1u64 << 32) / n as u64 * n as u64;
        loop {
            let r = self.next_u32() as u64;
            if r < limit {
                return (r % n as u64) as u32;
            }
        }
    }

    /// `uniform_int` for `usize` bounds below `2^32`.
    pub fn index(&mut self, n: usize) -> usize {
        self.uniform_int(u32::try_from(n).expect("bound exceeds u32")) as usize
    }

    /// One unit draw compared against `p`.
    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.next_unit() < p
    }

    /// Box-Muller on two unit draws `u1`, `u2` (in that order):
    /// `mean + sd * sqrt(-2 ln(1 - u1)) * cos(2 pi u2)`. The sine partner is
    /// discarded.
    pub fn normal(&mut self, mean: f64, sd: f64) -> f64 {
        let u1 = self.next_unit();
        let u2 = self.next_unit();
        let radius = (-2.0 * (1.0 - u1).ln()).sqrt();
        mean + sd * radius * (2.0 * PI * u2).cos()
    }

    /// Poisson variate by sequential search of the CDF on one unit draw.
    pub fn poisson(&mut self, rate: f64) -> u32 {
        let u = self.next_unit();
        let mut k = 0u32;
        let mut mass = (-rate).exp();
        let mut cdf = mass;
        // the cap only matters if rounding stalls the CDF below u
        while u > cdf && k < 10_000 {
            k += 1;
            mass *= rate / k as f64;
            cdf += mass;
        }
        k
    }

    /// In-place Fisher-Yates: for `i` from `len - 1` down to 1, swap `i`
    /// with `uniform_int(i + 1)`.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.index(i + 1);
            items.swap(i, j);
        }
    }
}
