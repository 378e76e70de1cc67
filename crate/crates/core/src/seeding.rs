//! Deterministic seed derivation and canonical subset hashing.
//!
//! Every source of randomness in this crate is keyed through these mixers so
//! that runs are reproducible from a single top-level seed, independent of
//! scheduling order.

use crate::factlang::FactId;

/// SplitMix64 finalizer. Stable across platforms and releases.
pub fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive a child seed from a parent seed and a stream index.
pub fn derive(seed: u64, stream: u64) -> u64 {
    splitmix64(seed ^ splitmix64(stream.wrapping_add(0xA076_1D64_78BD_642F)))
}

/// Derive a child seed from a parent seed and two stream indices.
pub fn derive2(seed: u64, a: u64, b: u64) -> u64 {
    derive(derive(seed, a), b)
}

/// Canonical 64-bit key of a fact subset. Input ids must be sorted ascending
/// so that the key depends only on set membership.
pub fn subset_key(ids: &[FactId]) -> u64 {
    debug_assert!(ids.windows(2).all(|w| w[0] < w[1]), "ids must be sorted and unique");
    let mut h: u64 = 0xCBF2_9CE4_8422_2325;
    for id in ids {
        h = (h ^ u64::from(id.0)).wrapping_mul(0x0000_0100_0000_01B3);
    }
    splitmix64(h)
}
