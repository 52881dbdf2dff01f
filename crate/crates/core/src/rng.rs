//! Counter-derived random streams.
//!
//! Every random draw in a certification run comes from a stream identified by
//! the run seed plus a short key (region, iteration, prototype, round). Streams
//! are independent of execution order, which keeps parallel and sequential
//! runs bit-identical.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mixes a seed with a key path into a new seed.
pub fn derive_seed(seed: u64, key: &[u64]) -> u64 {
    key.iter()
        .fold(splitmix64(seed), |acc, &k| splitmix64(acc ^ splitmix64(k.wrapping_add(0x632b_e59b_d9b4_e019))))
}

pub fn stream(seed: u64, key: &[u64]) -> StreamRng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, key))
}
