//! Deterministic seed derivation.
//!
//! Every randomized routine in this crate takes a single `u64` seed and
//! derives any per-worker seeds through [`derive_seed`], so results are
//! reproducible across runs, platforms, and thread counts.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer. Bijective on `u64`, good avalanche behaviour.
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Derives the seed for sub-stream `stream` of a base seed.
///
/// Distinct `(base, stream)` pairs map to distinct-looking seeds, so a
/// forest can hand tree `i` its own generator and stay reproducible no
/// matter how trees are scheduled.
pub fn derive_seed(base: u64, stream: u64) -> u64 {
    splitmix64(base ^ stream.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

/// The crate-wide generator: small, fast, and seedable from one `u64`.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
