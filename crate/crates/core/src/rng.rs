//! Seed derivation for the per-building and per-pair random streams.
//!
//! Every stochastic step draws from its own ChaCha stream keyed by a mix of
//! the global seed and stable identifiers, so results never depend on the
//! order in which work items are evaluated.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Folds a list of identifiers into one 64-bit seed.
pub fn mix_seed(parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(0x243f_6a88_85a3_08d3, |acc, &p| splitmix64(acc ^ splitmix64(p)))
}

pub fn stream(parts: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix_seed(parts))
}

/// Domain tags keep streams for different purposes apart even when the
/// numeric identifiers coincide.
pub mod domain {
    pub const CITY: u64 = 1;
    pub const DEGRADE: u64 = 2;
    pub const OVERLAP: u64 = 3;
    pub const RANDOM_BASELINE: u64 = 4;
}
