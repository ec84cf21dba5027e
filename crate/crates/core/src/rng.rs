//! Counter-based random streams for replica-parallel Monte Carlo.
//!
//! A stream is named by `(seed, stream_id)`. The seed keys a ChaCha8
//! generator and the stream id selects one of its 2^64 independent
//! keystreams, so replicas never share draws and can be replayed in any
//! order or on any thread.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngStreamSpec {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngStreamSpec {
    pub const fn new(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    /// Stream `offset` places after this one under the same seed.
    pub const fn offset(&self, offset: u64) -> Self {
        Self {
            seed: self.seed,
            stream_id: self.stream_id.wrapping_add(offset),
        }
    }

    pub fn open(&self) -> UniformStream {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        UniformStream { rng }
    }
}

/// Source of uniform draws on the open interval (0, 1).
#[derive(Debug, Clone)]
pub struct UniformStream {
    rng: ChaCha8Rng,
}

impl UniformStream {
    /// Top 53 bits of a word, shifted by half a step so neither 0 nor 1 occurs.
    #[inline]
    pub fn next_open01(&mut self) -> f64 {
        const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
        ((self.rng.next_u64() >> 11) as f64 + 0.5) * SCALE
    }

    #[inline]
    pub fn next_pair(&mut self) -> [f64; 2] {
        [self.next_open01(), self.next_open01()]
    }
}
