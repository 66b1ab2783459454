//! Reproducible random streams.
//!
//! Every consumer of randomness derives its own ChaCha8 stream from the
//! user seed and a path of tags (purpose, replicate, iteration, ...), so
//! streams never overlap and results do not depend on evaluation order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Stream purposes.
pub mod tag {
    pub const SIMULATE: u64 = 1;
    pub const SMC: u64 = 2;
    pub const CHAIN: u64 = 3;
    pub const PROPOSAL: u64 = 4;
    pub const ORACLE: u64 = 5;
    pub const REPLICATE: u64 = 6;
    pub const PREDICTIVE: u64 = 7;
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Hashes a seed and a tag path into a new 64-bit seed.
pub fn derive_seed(seed: u64, path: &[u64]) -> u64 {
    let mut state = seed;
    let mut out = splitmix64(&mut state);
    for &p in path {
        state ^= p.wrapping_mul(0xD6E8_FEB8_6659_FD93).rotate_left(17);
        out = splitmix64(&mut state) ^ out.rotate_left(29);
        state = out;
    }
    out
}

/// Independent stream keyed by `(seed, path)`.
pub fn stream(seed: u64, path: &[u64]) -> StreamRng {
    let mut state = derive_seed(seed, path);
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}
