//! Seeded, reproducible randomness.
//!
//! Every sampling entry point in this crate takes an explicit `u64` seed and
//! expands it into a ChaCha12 stream; there is no global RNG state. Distinct
//! logical streams (one per setting pair, per trial, per grid point) derive
//! their sub-seeds with a splitmix64 fold over a counter path, so results are
//! independent of evaluation order.

use rand_chacha::rand_core::SeedableRng;

/// The crate-wide deterministic generator (ChaCha with 12 rounds).
pub type SeededRng = rand_chacha::ChaCha12Rng;

/// splitmix64 finalizer; scrambles a 64-bit word into a well-mixed one.
fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a sub-seed for the logical stream identified by `path` (a sequence
/// of counters such as `[setting_pair]` or `[grid_index, trial]`).
pub fn derive_seed(seed: u64, path: &[u64]) -> u64 {
    let mut s = splitmix64(seed);
    for &id in path {
        s = splitmix64(s ^ splitmix64(id.wrapping_add(0xA076_1D64_78BD_642F)));
    }
    s
}

/// A generator for the root stream of `seed`.
pub fn rng_from_seed(seed: u64) -> SeededRng {
    SeededRng::seed_from_u64(seed)
}

/// A generator for the sub-stream of `seed` at `path`.
pub fn derived_rng(seed: u64, path: &[u64]) -> SeededRng {
    SeededRng::seed_from_u64(derive_seed(seed, path))
}
