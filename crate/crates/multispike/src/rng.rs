//! Seed derivation for reproducible parallel Monte Carlo.
//!
//! Every replicate (and every internal stream: data generation, Haar draws,
//! field simulation) owns an RNG seeded by `(base_seed, stream_index)`. The
//! derived seed is produced by a SplitMix64 avalanche, so streams are
//! decorrelated regardless of how replicates are scheduled across workers,
//! and results do not depend on thread count.

use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;

/// SplitMix64 finalizer; full-avalanche mixing of a 64-bit word.
#[inline]
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive a well-mixed seed for stream `stream` of a run keyed by `seed`.
#[inline]
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    splitmix64(seed ^ splitmix64(stream.wrapping_mul(0x9e37_79b9_7f4a_7c15)))
}

/// RNG for stream `stream` of a run keyed by `seed`.
///
/// Deterministic in `(seed, stream)`; distinct streams behave as independent
/// generators for Monte Carlo purposes.
pub fn stream_rng(seed: u64, stream: u64) -> Xoshiro256PlusPlus {
    Xoshiro256PlusPlus::seed_from_u64(derive_seed(seed, stream))
}
