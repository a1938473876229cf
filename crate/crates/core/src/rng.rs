//! Deterministic random streams.
//!
//! Every stochastic routine in the crate takes an explicit `&mut R: Rng`.
//! Experiments derive independent streams from a single master seed: the
//! ChaCha8 key is the master seed and the 64-bit stream id is
//! `splitmix64(fnv1a(component) ^ index)`. Two calls with the same triple
//! always return bit-identical generators.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// Generator seeded from `seed` on the default stream.
pub fn seeded(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream for `(component, index)` under a master seed.
pub fn stream(master: u64, component: &str, index: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(stream_id(component, index));
    rng
}

pub fn stream_id(component: &str, index: u64) -> u64 {
    splitmix64(fnv1a(component.as_bytes()) ^ index)
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325_u64;
    for &b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
