//! Seed discipline: one master seed, one ChaCha stream per (stage, index).
//!
//! Every random draw is taken from `ChaCha8Rng::seed_from_u64(master)` with
//! its stream id set to `stage << 48 | index`, so trial `i` sees the same
//! randomness no matter which worker runs it or in which order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent random streams derived from a master seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stage {
    Codebook = 1,
    Message = 2,
    Starts = 3,
    Erasures = 4,
    Probe = 5,
    Trial = 6,
    Instance = 7,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Seeder {
    master: u64,
}

impl Seeder {
    pub fn new(master: u64) -> Self {
        Self { master }
    }

    pub fn master(&self) -> u64 {
        self.master
    }

    pub fn rng(&self, stage: Stage, index: u64) -> ChaCha8Rng {
        debug_assert!(index < 1 << 48);
        let mut rng = ChaCha8Rng::seed_from_u64(self.master);
        rng.set_stream(((stage as u64) << 48) | index);
        rng
    }

    /// A child seeder, e.g. for one Monte Carlo trial.
    pub fn child(&self, stage: Stage, index: u64) -> Seeder {
        use rand::RngCore;
        Seeder::new(self.rng(stage, index).next_u64())
    }
}
