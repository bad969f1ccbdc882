//! Seed mixing and counter-addressed failure draws.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Folds a sequence of integers into one well-mixed 64-bit seed.
pub fn mix_seed(parts: &[u64]) -> u64 {
    let mut h: u64 = 0x6a09_e667_f3bc_c908;
    for &p in parts {
        h = splitmix64(h ^ splitmix64(p));
    }
    h
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// One robot's failure substream: ChaCha8 keyed by the trial seed, with the
/// robot id as stream number. Draw `k` is read at a fixed counter position,
/// so draws do not depend on how many other draws were made before.
#[derive(Debug, Clone)]
pub struct FailureStream {
    rng: ChaCha8Rng,
}

impl FailureStream {
    pub fn new(trial_seed: u64, robot: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(trial_seed);
        rng.set_stream(robot as u64);
        Self { rng }
    }

    /// Uniform draw in `(0, 1]` for plan cell `index`.
    pub fn draw(&mut self, index: usize) -> f64 {
        // Two 32-bit words per u64.
        self.rng.set_word_pos(2 * index as u128);
        let bits = self.rng.next_u64() >> 11;
        (bits + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}
