//! Deterministic random stream used by the simulation.
//!
//! Every stochastic choice in a run flows through a single [`SimRng`]
//! stream so that a `(config, seed)` pair replays bit-identically. The
//! generator is PCG (XSL-RR 128/64, the `Pcg64Mcg` flavour), seeded from a
//! 64-bit value through SplitMix64.
//!
//! Draw derivations are fixed:
//!
//! * [`SimRng::unit`] takes the top 53 bits of `next_u64` and scales by
//!   2^-53, giving a uniform double in `[0, 1)`;
//! * [`SimRng::below`] masks `next_u64` down to the next power of two and
//!   rejects values `>= n`, giving an unbiased uniform integer in `[0, n)`;
//! * [`SimRng::shuffle`] is a Fisher-Yates pass from the back of the slice
//!   using `below`.

use rand_core::{Rng, SeedableRng};
use rand_pcg::Pcg64Mcg;

#[derive(Clone, Debug)]
pub struct SimRng {
    inner: Pcg64Mcg,
}

impl SimRng {
    pub fn seed_from(seed: u64) -> Self {
        SimRng { inner: Pcg64Mcg::seed_from_u64(seed) }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform double in `[0, 1)` with 53-bit resolution.
    pub fn unit(&mut self) -> f64 {
        const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
        (self.next_u64() >> 11) as f64 * SCALE
    }

    /// Uniform integer in `[0, n)`, `n > 0`, by bitmask rejection.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "below(0) is meaningless");
        let mask = n.next_power_of_two() - 1;
        loop {
            let v = self.next_u64() & mask;
            if v < n {
                return v;
            }
        }
    }

    /// In-place Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }
}

/// Derive an independent seed from a base seed and two lane indices.
///
/// Used to give every sweep cell (grid index, repetition) its own stream
/// while keeping each cell individually replayable. The mix is the
/// SplitMix64 finalizer over a lane-weighted combination.
pub fn mix_seed(base: u64, lane_a: u64, lane_b: u64) -> u64 {
    let mut z = base
        .wrapping_add(lane_a.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(lane_b.wrapping_mul(0xC2B2_AE3D_27D4_EB4F));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
