//! Deterministic keyed random streams. Every consumer derives its own
//! stream from the master seed and a tag path, so parallel execution over
//! drops never changes any sequence.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const TAG_TOPOLOGY: u64 = 0x10;
pub const TAG_USER_POS: u64 = 0x20;
pub const TAG_SHADOWING: u64 = 0x30;
pub const TAG_PHASES: u64 = 0x40;
pub const TAG_SOLVER: u64 = 0x50;

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Independent stream keyed by the master seed and a tag path.
pub fn stream(master: u64, tags: &[u64]) -> ChaCha8Rng {
    let mut state = splitmix(master ^ 0x5eed_cafe_f00d_d00d);
    for &t in tags {
        state = splitmix(state ^ splitmix(t));
    }
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        state = splitmix(state);
        chunk.copy_from_slice(&state.to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}
