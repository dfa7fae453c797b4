//! Seed plumbing. Every stochastic routine in the crate takes an explicit
//! 64-bit seed; sub-streams are derived with a SplitMix64 finalizer so that
//! trial `i` of a sweep does not depend on how many trials ran before it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Mixes `stream` into `seed`, producing an independent child seed.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A fresh seed from OS entropy, for interactive runs without `--seed`.
pub fn entropy_seed() -> u64 {
    rand::random()
}
