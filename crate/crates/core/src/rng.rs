//! Deterministic random number generation.
//!
//! Every stochastic component takes an explicit `u64` seed and builds a
//! ChaCha8 stream from it, so a `(seed, config)` pair reproduces a run
//! byte-for-byte on any platform. Replica ensembles derive independent
//! child seeds through a SplitMix64 counter scheme.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The PRNG used throughout the crate.
pub type Rng = ChaCha8Rng;

/// Build the generator for a root seed.
pub fn rng_from_seed(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 finalizer (Steele, Lea, Flood 2014).
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive the seed for replica `index` of an ensemble rooted at `seed`.
///
/// Distinct `(seed, index)` pairs map to well-separated streams; the same
/// pair always maps to the same stream regardless of scheduling order.
pub fn child_seed(seed: u64, index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(index.wrapping_add(0x51ed_270b)))
}
