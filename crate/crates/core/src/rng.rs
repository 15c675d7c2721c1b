//! Reproducible random streams.
//!
//! Every random quantity in the crate is drawn from an [`RngStream`]: a
//! ChaCha8 generator keyed by a 64-bit seed and positioned on one of its
//! 2^64 independent streams. Parallel work never shares a stream; each
//! worker gets a [`RngStream::substream`] derived from its index, so results
//! do not depend on how work is scheduled.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Seed used when the caller does not supply one.
pub const DEFAULT_SEED: u64 = 0x4d45_434b_4500_2017;

#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    stream: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { seed, stream, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_index(&self) -> u64 {
        self.stream
    }

    /// An independent child stream, determined only by `(seed, stream,
    /// index)` and not by how many variates have been drawn from `self`.
    pub fn substream(&self, index: u64) -> RngStream {
        RngStream::new(
            splitmix64(self.seed ^ splitmix64(self.stream ^ 0xa076_1d64_78bd_642f)),
            index,
        )
    }

    /// Shorthand for a chain of [`substream`](Self::substream) calls.
    pub fn path(&self, indices: &[u64]) -> RngStream {
        indices
            .iter()
            .fold(self.clone(), |acc, &i| acc.substream(i))
    }
}

impl Default for RngStream {
    fn default() -> Self {
        Self::new(DEFAULT_SEED, 0)
    }
}

impl RngCore for RngStream {
    #[inline]
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    #[inline]
    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    #[inline]
    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
