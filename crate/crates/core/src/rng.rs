//! Counter-based seeded streams.
//!
//! Every Monte Carlo loop derives one ChaCha stream per trial from
//! `(seed, trial index)`, so results do not depend on scheduling order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator handed to every sampling routine.
pub type StreamRng = ChaCha8Rng;

/// A master seed from which independent, reproducible sub-streams are cut.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SeedStream {
    seed: u64,
}

impl SeedStream {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Stream for trial `index`. Distinct indices give non-overlapping ChaCha streams.
    pub fn trial(&self, index: u64) -> StreamRng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        rng
    }

    /// A child seed for a named sub-experiment (encoder draw, path draws, ...).
    pub fn fork(&self, label: u64) -> SeedStream {
        SeedStream {
            seed: splitmix64(self.seed ^ splitmix64(label.wrapping_add(0x9e37_79b9_7f4a_7c15))),
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
