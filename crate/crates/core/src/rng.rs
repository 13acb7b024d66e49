//! Counter-based random streams.
//!
//! Every draw in the engine comes from a ChaCha8 stream addressed by
//! `(seed, purpose, time index, sub index)` for the key and the path index for
//! the stream id. A path's randomness therefore never depends on which worker
//! simulates it or in what order, and streams with different purposes never
//! overlap.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Tag separating independent uses of randomness within one run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Purpose(pub u64);

impl Purpose {
    pub const COERCION: Purpose = Purpose(0x636f_6572_6365);
    pub const PRIMAL: Purpose = Purpose(0x7072_696d_616c);
    pub const DUAL: Purpose = Purpose(0x6475_616c);
    pub const SUBSIM: Purpose = Purpose(0x7375_6273_696d);
    pub const EUROPEAN: Purpose = Purpose(0x6575_726f);
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StreamKey {
    seed: u64,
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl StreamKey {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// The stream for one path at one time step. `sub` distinguishes nested
    /// draws made from the same path and time (subsimulated successors).
    pub fn rng(&self, purpose: Purpose, path: u64, time: u64, sub: u64) -> ChaCha8Rng {
        let mut state = self.seed;
        let mut key = [0u8; 32];
        let mut mix = splitmix64(&mut state);
        for word in [purpose.0, time, sub] {
            state ^= word.wrapping_mul(0xd605_bbb5_8c8a_bbb5) ^ mix;
            mix = splitmix64(&mut state);
        }
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(path);
        rng
    }
}
