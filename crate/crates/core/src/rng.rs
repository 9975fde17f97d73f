// Copyright 2026 The randord Authors
// SPDX-License-Identifier: Apache-2.0

//! Counter-based random streams for ordinate sampling.
//!
//! Every draw is addressed by `(seed, sample index, cell index, slot)`:
//! the seed keys a ChaCha8 block cipher, the sample index selects the
//! 64-bit stream and the cell index positions the block counter. A draw
//! therefore never depends on how many other draws happened before it, so
//! ensembles give identical results regardless of worker count or order.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// u32 words reserved for each cell (two u64 draws).
const WORDS_PER_CELL: u128 = 4;

/// Address of one ROM sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SampleKey {
    pub seed: u64,
    pub index: u64,
}

impl SampleKey {
    pub const fn new(seed: u64, index: u64) -> Self {
        Self { seed, index }
    }

    pub fn stream(&self) -> CellStream {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.index);
        CellStream { rng }
    }
}

impl From<u64> for SampleKey {
    fn from(seed: u64) -> Self {
        Self::new(seed, 0)
    }
}

/// Random access into one sample's stream.
pub struct CellStream {
    rng: ChaCha8Rng,
}

impl CellStream {
    /// Two independent uniforms in `[0, 1)` owned by `cell`.
    pub fn cell_uniforms(&mut self, cell: usize) -> [f64; 2] {
        self.rng.set_word_pos(cell as u128 * WORDS_PER_CELL);
        [unit(self.rng.next_u64()), unit(self.rng.next_u64())]
    }
}

/// Top 53 bits as a float in `[0, 1)`.
fn unit(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// SplitMix64 finalizer, used to derive independent seeds from a base seed
/// and a tag (for example one seed per velocity resolution in a study).
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    let mut z = seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
