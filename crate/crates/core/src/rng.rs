//! Seeded randomness.
//!
//! Every random quantity in the crate is drawn from a [`ChaCha8Rng`] built by
//! [`seeded_rng`]. Experiments with many replicates derive one seed per
//! replicate through [`replicate_seed`], so a replicate's stream depends only
//! on `(master, k)` and never on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for replicate `k` of an experiment keyed by `master`.
pub fn replicate_seed(master: u64, k: u64) -> u64 {
    mix64(mix64(master).wrapping_add(k.wrapping_mul(0x9e37_79b9_7f4a_7c15)))
}
