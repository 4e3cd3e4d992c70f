//! Counter-based randomness: every draw is a pure function of
//! `(seed, stream, index)`, so samples can be produced in any order or from
//! any number of workers without changing the result.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CounterRng {
    seed: u64,
}

impl CounterRng {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self, stream: u64) -> Stream {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        Stream { rng }
    }
}

/// One independent stream of a [`CounterRng`].
#[derive(Debug, Clone)]
pub struct Stream {
    rng: ChaCha8Rng,
}

fn unit(u: u64) -> f64 {
    (u >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

impl Stream {
    /// Uniform in `[0, 1)`, continuing from the current position.
    pub fn next_f64(&mut self) -> f64 {
        unit(self.rng.next_u64())
    }

    /// Uniform in `[-1, 1)`.
    pub fn next_symmetric(&mut self) -> f64 {
        2.0 * self.next_f64() - 1.0
    }

    /// Fills `out` with the uniform `[0, 1)` block that belongs to `index`,
    /// independently of any earlier draws.
    pub fn block_at(&mut self, index: u64, out: &mut [f64]) {
        let width = out.len() as u128;
        // two 32-bit words per f64
        self.rng.set_word_pos(index as u128 * width * 2);
        for v in out.iter_mut() {
            *v = unit(self.rng.next_u64());
        }
    }
}
