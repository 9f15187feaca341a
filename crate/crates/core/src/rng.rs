//! Deterministic per-trajectory random streams.
//!
//! Every trajectory owns ChaCha8 stream number `index` under the run seed, so
//! the noise it sees depends only on `(seed, index)` and on how many words it
//! has already consumed, never on how trajectories are scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NoiseStreams {
    seed: u64,
}

/// Stream reserved for drawing initial conditions, disjoint from trajectory streams.
const INITIAL_CONDITION_STREAM: u64 = u64::MAX;

impl NoiseStreams {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Generator for trajectory `index`, positioned `word_pos` 32-bit words in.
    pub fn stream(&self, index: u64, word_pos: u128) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        if word_pos != 0 {
            rng.set_word_pos(word_pos);
        }
        rng
    }

    pub fn initial_conditions(&self) -> ChaCha8Rng {
        self.stream(INITIAL_CONDITION_STREAM, 0)
    }
}
